#ifndef WSBM_VERSION_HPP
#define WSBM_VERSION_HPP

namespace wsbm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wsbm

#endif
