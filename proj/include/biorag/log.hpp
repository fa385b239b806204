#pragma once

#include <cstdio>
#include <string>

namespace biorag {

inline void log_warn(const std::string& msg) {
    std::fprintf(stderr, "[biorag] warning: %s\n", msg.c_str());
}

}  // namespace biorag
