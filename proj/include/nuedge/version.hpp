#ifndef NUEDGE_VERSION_HPP
#define NUEDGE_VERSION_HPP

namespace nuedge {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nuedge

#endif  // NUEDGE_VERSION_HPP
