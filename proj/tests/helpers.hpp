#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "l42mu/driver.hpp"

namespace testutil {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::string corpus_text(const std::string& name) {
    return read_file(std::string(L42MU_CORPUS_DIR) + "/" + name);
}

inline l42mu::AnalyzedProgram analyze_corpus(const std::string& name, bool full_check = true,
                                             bool record_trace = false,
                                             l42mu::PipelineOptions options = {}) {
    return l42mu::analyze(l42mu::load_text(corpus_text(name), options, name), options, full_check,
                          record_trace);
}

inline l42mu::AnalyzedProgram analyze_src(const std::string& text, bool full_check = true,
                                          bool record_trace = false,
                                          l42mu::PipelineOptions options = {}) {
    return l42mu::analyze(l42mu::load_text(text, options), options, full_check, record_trace);
}

inline l42mu::TableView view_of(const l42mu::AnalyzedProgram& analyzed, bool prelude = true) {
    l42mu::TableView view;
    view.table = &analyzed.compiled.table;
    view.prelude = prelude;
    return view;
}

inline const l42mu::CodeLiteral& literal_of(const l42mu::AnalyzedProgram& analyzed,
                                            const std::string& name) {
    const l42mu::Declaration* d = analyzed.compiled.table.find(name);
    REQUIRE(d != nullptr);
    REQUIRE(d->literal() != nullptr);
    return *d->literal();
}

}  // namespace testutil
