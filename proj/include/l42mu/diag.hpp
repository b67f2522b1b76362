#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace l42mu {

// Half-open source range, 1-based lines/columns. line == 0 means "no position".
struct Span {
    std::uint32_t file = 0;
    std::uint32_t line = 0;
    std::uint32_t col = 0;
    std::uint32_t end_line = 0;
    std::uint32_t end_col = 0;
};

enum class DiagCode {
    MethodClash,
    ClassClash,
    ImplementsClash,
    UnknownTrait,
    NotWellFormed,
    NotCoherent,
    TypeError,
    OrderError,
    Stuck,
    FuelExhausted,
};

std::string_view diag_code_name(DiagCode code);

struct Diagnostic {
    DiagCode code = DiagCode::NotWellFormed;
    std::string message;
    Span span{};
    int decl_index = -1;
};

inline Diagnostic make_diag(DiagCode code, Span span, std::string message, int decl_index = -1) {
    return Diagnostic{code, std::move(message), span, decl_index};
}

// Value-or-diagnostic result. Most composition/typing operations use this.
template <class T>
class Expected {
  public:
    Expected(T value) : data_(std::move(value)) {}
    Expected(Diagnostic diag) : data_(std::move(diag)) {}

    bool ok() const { return std::holds_alternative<T>(data_); }
    explicit operator bool() const { return ok(); }

    const T& value() const& { return std::get<T>(data_); }
    T&& value() && { return std::get<T>(std::move(data_)); }
    const Diagnostic& error() const { return std::get<Diagnostic>(data_); }

  private:
    std::variant<T, Diagnostic> data_;
};

}  // namespace l42mu
