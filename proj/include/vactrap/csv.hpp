#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

namespace vactrap::csv {

// Scientific notation with 10 significant digits, '.' decimal separator.
std::string number(double v);

void header(std::ostream& os, std::initializer_list<std::string_view> columns);

// Writes one row; integers and strings pass through unchanged.
template <class... Ts>
void row(std::ostream& os, const Ts&... values)
{
    bool first = true;
    auto put = [&](const auto& v) {
        if (!first) os << ',';
        first = false;
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_floating_point_v<V>)
            os << number(static_cast<double>(v));
        else
            os << v;
    };
    (put(values), ...);
    os << '\n';
}

} // namespace vactrap::csv
