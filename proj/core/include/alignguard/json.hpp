#pragma once

// nlohmann/json, wherever it lives: the system package or a vendored
// single header on the include path.
#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#elif __has_include(<json.hpp>)
#include <json.hpp>
#else
#error "nlohmann/json header not found"
#endif
