#pragma once

#include <cctype>
#include <stdexcept>
#include <string>

namespace mfqa::detail {

[[noreturn]] inline void parse_fail(std::size_t line, const std::string& msg) {
    throw std::runtime_error("line " + std::to_string(line) + ": " + msg);
}

inline std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace mfqa::detail
