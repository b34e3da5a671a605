#include "maxlab/spec_args.hpp"

#include <sstream>
#include <stdexcept>

#include "maxlab/error.hpp"

namespace maxlab {

SpecArgs SpecArgs::parse(const std::string& text) {
    SpecArgs out;
    const auto colon = text.find(':');
    out.kind = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? std::string() : text.substr(colon + 1);
    std::stringstream ss(args);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) out.positional.push_back(item);
        else out.named[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

namespace {

double to_number(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad number '" + s + "' for " + what);
    }
}

std::uint64_t to_unsigned(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        if (s.empty() || s[0] == '-') throw std::invalid_argument(s);
        const auto v = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad integer '" + s + "' for " + what);
    }
}

} // namespace

std::uint64_t SpecArgs::unsigned_integer(const std::string& key, std::size_t pos, std::uint64_t fallback) const {
    if (auto it = named.find(key); it != named.end()) return to_unsigned(it->second, key);
    if (pos < positional.size()) return to_unsigned(positional[pos], key);
    return fallback;
}

double SpecArgs::number(const std::string& key, std::size_t pos, double fallback) const {
    if (auto it = named.find(key); it != named.end()) return to_number(it->second, key);
    if (pos < positional.size()) return to_number(positional[pos], key);
    return fallback;
}

} // namespace maxlab
