#ifndef SRB_ERROR_HPP
#define SRB_ERROR_HPP

#include <stdexcept>
#include <string>

namespace srb {

enum class errc {
    invalid_input,
    invalid_message,
    conflict,
    not_found,
    cycle,
    framing,
    unsupported,
    truncation,
    connectivity,
    extrapolation,
    joint_limit,
    parse,
    unready,
    type_mismatch,
    transport,
    degenerate_geometry,
};

inline const char* errc_name(errc c) {
    switch (c) {
    case errc::invalid_input: return "invalid-input";
    case errc::invalid_message: return "invalid-message";
    case errc::conflict: return "conflict";
    case errc::not_found: return "not-found";
    case errc::cycle: return "cycle";
    case errc::framing: return "framing";
    case errc::unsupported: return "unsupported";
    case errc::truncation: return "truncation";
    case errc::connectivity: return "connectivity";
    case errc::extrapolation: return "extrapolation";
    case errc::joint_limit: return "joint-limit";
    case errc::parse: return "parse";
    case errc::unready: return "unready";
    case errc::type_mismatch: return "type-mismatch";
    case errc::transport: return "transport";
    case errc::degenerate_geometry: return "degenerate-geometry";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const { return code_; }

private:
    errc code_;
};

// Parse errors carry the source location of the offending element.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int column = 0)
        : Error(errc::parse, what + " (line " + std::to_string(line) +
                                 (column > 0 ? ", col " + std::to_string(column) : "") + ")"),
          line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

} // namespace srb

#endif
