#pragma once

namespace coxnet {

inline constexpr const char* version = "0.1.0";

}
