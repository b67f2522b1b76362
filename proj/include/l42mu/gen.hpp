#pragma once

#include <cstdint>
#include <vector>

#include "l42mu/ast.hpp"

namespace l42mu {

// Deterministic generator state (splitmix64); the seed fully determines
// every generated artifact.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    int below(int n) { return n <= 1 ? 0 : static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
    bool pct(int p) { return below(100) < p; }

    template <class T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<size_t>(below(static_cast<int>(v.size())))];
    }

  private:
    std::uint64_t state_;
};

struct GenConfig {
    std::uint64_t seed = 0;
    int max_decls = 6;
    int max_members = 5;
    int max_arity = 3;
    int max_depth = 1;        // nested-literal depth
    int pct_abstract = 40;
    int pct_interface = 15;
    int pct_composition = 55;  // declaration body is a composition expression
    int pct_trait_split = 60;  // well-typed mode: assemble classes from traits
    bool well_typed = false;   // bias toward typeable tables (progress suite)
};

// Syntactically well-formed table; typeability is not guaranteed unless
// config.well_typed is set (and even then composition clashes stay possible
// only through generator bugs — the harness treats non-compiling well-typed
// tables as skips).
DeclarationTable gen_table(const GenConfig& config);

// Standalone literal for the composition-algebra laws; draws names from a
// small pool so identical identities across samples are frequent.
CodeLiteral gen_literal(Rng& rng, const GenConfig& config, int depth = 0);

// Closed well-typed expressions over a compiled table: factory values wrapped
// in getter/wither/implemented-method calls.
std::vector<ExprPtr> gen_expressions(const TableView& view, std::uint64_t seed, int count);

}  // namespace l42mu
