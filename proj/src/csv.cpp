#include "vactrap/csv.hpp"

#include <fmt/format.h>

namespace vactrap::csv {

std::string number(double v) { return fmt::format("{:.9e}", v); }

void header(std::ostream& os, std::initializer_list<std::string_view> columns)
{
    bool first = true;
    for (auto c : columns) {
        if (!first) os << ',';
        first = false;
        os << c;
    }
    os << '\n';
}

} // namespace vactrap::csv
