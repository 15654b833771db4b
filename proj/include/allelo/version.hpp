#ifndef ALLELO_VERSION_HPP
#define ALLELO_VERSION_HPP

namespace allelo {
inline constexpr const char* kVersion = "0.1.0";
}

#endif
