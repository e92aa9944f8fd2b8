#include "wulffgrid/format.hpp"

#include <cstdio>

namespace wulffgrid {

std::string fmt9(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", x);
    std::string s(buf);
    if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

}  // namespace wulffgrid
