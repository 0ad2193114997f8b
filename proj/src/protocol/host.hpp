#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

namespace pacasm::protocol {

// Session protocol host. Every request is a JSON object with an "op" field;
// every response is {"ok": true, "payload": ...} or
// {"ok": false, "error": {"code": ..., "message": ...}}.
class Host {
 public:
  explicit Host(std::filesystem::path stages_dir);
  ~Host();

  std::string open();                    // "s1", "s2", ...
  bool close(const std::string& token);  // false for an unknown token
  size_t session_count() const;

  // Requests on one token are processed in arrival order; different tokens
  // run concurrently.
  std::string handle(const std::string& token, std::string_view request);

 private:
  struct Slot;

  std::filesystem::path stages_dir_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Slot>> slots_;
  uint64_t next_ = 1;
};

}  // namespace pacasm::protocol
