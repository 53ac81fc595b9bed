#ifndef IBOOPT_VERSION_HPP
#define IBOOPT_VERSION_HPP

namespace iboopt {

inline constexpr const char* kToolName = "iboopt";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace iboopt

#endif
