#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "l42mu/ast.hpp"
#include "l42mu/compose.hpp"
#include "l42mu/gen.hpp"

namespace l42mu {

struct Verdict {
    bool pass = true;
    long long cases = 0;
    long long skipped = 0;
    std::string detail;
};

// Along every compose step, the number of ill-typed literal sub-expressions
// never increases (vacuous up to an abort).
Verdict check_theorem_a2(const DeclarationTable& table, bool prelude = false);

// On a table that compiles cleanly, no generated closed well-typed expression
// gets stuck before fuel runs out.
Verdict check_theorem_a1(const DeclarationTable& table, int expr_count, long long fuel,
                         std::uint64_t seed, bool prelude = false);

// Commutativity (result or diagnostic code), associativity where every sum
// succeeds, and {} as identity, over literal pairs/triples.
Verdict check_algebra(const GenConfig& config, int samples);

// Getter/wither laws on random coherent factories: F(v).xi() = vi,
// F(v).withXi(w).xi() = w, F(v).withXi(w).xj() = vj for j != i.
Verdict check_state_laws(std::uint64_t seed, int samples);

// Greedy shrink: drop declarations, then literal members, while the failure
// predicate keeps holding.
DeclarationTable shrink_table(const DeclarationTable& table,
                              const std::function<bool(const DeclarationTable&)>& still_fails);

struct FuzzSummary {
    long long tables = 0;
    long long failures = 0;
    long long skipped = 0;
    long long divergence = 0;  // demand-driven rejects, maximal prefix accepts
    std::string detail;
};

// Seeded campaigns; counterexamples are shrunk and written to out_dir (when
// non-empty) as .l42mu sources.
FuzzSummary fuzz_a2(std::uint64_t seed, int count, const std::string& out_dir);
FuzzSummary fuzz_a1(std::uint64_t seed, int count, int exprs_per_table, long long fuel,
                    const std::string& out_dir);
FuzzSummary fuzz_algebra(std::uint64_t seed, int count, const std::string& out_dir);

}  // namespace l42mu
