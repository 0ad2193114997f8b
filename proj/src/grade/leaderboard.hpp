#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "grade/grader.hpp"

namespace pacasm::grade {

struct LeaderboardEntry {
  std::string student;
  std::string stage;
  uint64_t cycles = 0;
  int64_t timestamp_ms = 0;

  friend bool operator==(const LeaderboardEntry&, const LeaderboardEntry&) = default;
};

// Ascending cycles, then earlier timestamp, then student id.
bool ranks_before(const LeaderboardEntry& a, const LeaderboardEntry& b);

// Best entry per student for `stage`, in rank order.
std::vector<LeaderboardEntry> standings(const std::vector<LeaderboardEntry>& log, const std::string& stage);

class SubmissionRejected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Append-only JSON-lines store. Writers in this process are serialized by a
// mutex and across processes by an exclusive file lock.
class Leaderboard {
 public:
  explicit Leaderboard(std::filesystem::path path) : path_(std::move(path)) {}

  // Returns the student's 1-based rank after the upsert. Throws
  // SubmissionRejected for a rejected report, std::runtime_error on I/O.
  uint32_t submit(const GradeReport& report, const std::string& student);

  std::vector<LeaderboardEntry> read() const;  // raw log; malformed lines skipped
  std::vector<LeaderboardEntry> standings(const std::string& stage) const;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::mutex mu_;
};

std::string to_json(const LeaderboardEntry& e);
std::optional<LeaderboardEntry> entry_from_json(std::string_view line);

}  // namespace pacasm::grade
