#ifndef MBINET_LOG_HPP
#define MBINET_LOG_HPP

#include <sstream>
#include <string>

namespace mbinet {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Current level; initialized from MBI_LOG_LEVEL (error|warn|info|debug).
LogLevel log_level();
void set_log_level(LogLevel level);

void log_write(LogLevel level, const std::string& msg);

namespace detail {
inline void log_fmt(std::ostringstream&) {}
template <typename T, typename... Rest>
void log_fmt(std::ostringstream& os, const T& v, const Rest&... rest) {
  os << v;
  log_fmt(os, rest...);
}
}  // namespace detail

template <typename... Args>
void log(LogLevel level, const Args&... args) {
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  std::ostringstream os;
  detail::log_fmt(os, args...);
  log_write(level, os.str());
}

#define MBI_LOG_ERROR(...) ::mbinet::log(::mbinet::LogLevel::Error, __VA_ARGS__)
#define MBI_LOG_WARN(...) ::mbinet::log(::mbinet::LogLevel::Warn, __VA_ARGS__)
#define MBI_LOG_INFO(...) ::mbinet::log(::mbinet::LogLevel::Info, __VA_ARGS__)
#define MBI_LOG_DEBUG(...) ::mbinet::log(::mbinet::LogLevel::Debug, __VA_ARGS__)

}  // namespace mbinet

#endif  // MBINET_LOG_HPP
