#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace maxlab {

/// "kind:a,b,key=value" split into the kind, positional and named arguments.
struct SpecArgs {
    std::string kind;
    std::vector<std::string> positional;
    std::map<std::string, std::string> named;

    static SpecArgs parse(const std::string& text);

    /// Named value if present, else the positional one, else fallback.
    /// Throws ParseError when the text is not a number.
    double number(const std::string& key, std::size_t pos, double fallback) const;
    std::uint64_t unsigned_integer(const std::string& key, std::size_t pos, std::uint64_t fallback) const;
};

} // namespace maxlab
