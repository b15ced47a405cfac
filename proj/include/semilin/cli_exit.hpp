#pragma once

namespace semilin {
namespace cli {

// Exit-code contract: 0 success, 2 configuration error, 3 certificate
// refusal, 4 numerical failure.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_certificate = 3;
inline constexpr int exit_numerical = 4;

}  // namespace cli
}  // namespace semilin
