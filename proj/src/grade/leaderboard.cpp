#include "grade/leaderboard.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <map>
#include <tuple>

#include <json.hpp>

#include "common/text.hpp"

namespace pacasm::grade {

bool ranks_before(const LeaderboardEntry& a, const LeaderboardEntry& b) {
  return std::tie(a.cycles, a.timestamp_ms, a.student) < std::tie(b.cycles, b.timestamp_ms, b.student);
}

std::vector<LeaderboardEntry> standings(const std::vector<LeaderboardEntry>& log, const std::string& stage) {
  std::map<std::string, LeaderboardEntry> best;
  for (const auto& e : log) {
    if (e.stage != stage) continue;
    auto [it, inserted] = best.emplace(e.student, e);
    if (!inserted && ranks_before(e, it->second)) it->second = e;
  }
  std::vector<LeaderboardEntry> out;
  out.reserve(best.size());
  for (auto& [_, e] : best) out.push_back(std::move(e));
  std::sort(out.begin(), out.end(), ranks_before);
  return out;
}

std::string to_json(const LeaderboardEntry& e) {
  nlohmann::ordered_json j;
  j["student"] = e.student;
  j["stage"] = e.stage;
  j["cycles"] = e.cycles;
  j["ts"] = e.timestamp_ms;
  return j.dump();
}

std::optional<LeaderboardEntry> entry_from_json(std::string_view line) {
  const auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  try {
    LeaderboardEntry e;
    e.student = j.at("student").get<std::string>();
    e.stage = j.at("stage").get<std::string>();
    e.cycles = j.at("cycles").get<uint64_t>();
    e.timestamp_ms = j.at("ts").get<int64_t>();
    return e;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

namespace {

class FileLock {
 public:
  FileLock(const std::filesystem::path& path, int operation) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) throw std::runtime_error("cannot open " + path.string() + ": " + std::strerror(errno));
    while (::flock(fd_, operation) != 0) {
      if (errno != EINTR) {
        ::close(fd_);
        throw std::runtime_error("cannot lock " + path.string() + ": " + std::strerror(errno));
      }
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;
  int fd() const { return fd_; }

 private:
  int fd_ = -1;
};

std::vector<LeaderboardEntry> parse_log(const std::string& contents) {
  std::vector<LeaderboardEntry> out;
  for (const auto& line : text::split_lines(contents)) {
    if (text::trim(line).empty()) continue;
    if (auto e = entry_from_json(line)) out.push_back(std::move(*e));
  }
  return out;
}

}  // namespace

uint32_t Leaderboard::submit(const GradeReport& report, const std::string& student) {
  if (!report.accepted())
    throw SubmissionRejected("only accepted submissions are ranked (" + report.failure_text() + ")");
  if (student.empty()) throw SubmissionRejected("student id is empty");

  const LeaderboardEntry entry{student, report.stage, report.cycles.value_or(0), report.timestamp_ms};
  std::lock_guard guard(mu_);
  FileLock lock(path_, LOCK_EX);
  const std::string line = to_json(entry) + "\n";
  size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::write(lock.fd(), line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error("cannot append to " + path_.string() + ": " + std::strerror(errno));
    }
    written += static_cast<size_t>(n);
  }
  const auto contents = text::read_file(path_.string());
  const auto ranked = grade::standings(parse_log(contents.value_or("")), entry.stage);
  const auto it = std::find_if(ranked.begin(), ranked.end(),
                               [&](const LeaderboardEntry& e) { return e.student == student; });
  return static_cast<uint32_t>(it - ranked.begin()) + 1;
}

std::vector<LeaderboardEntry> Leaderboard::read() const {
  std::lock_guard guard(mu_);
  if (!std::filesystem::exists(path_)) return {};
  FileLock lock(path_, LOCK_SH);
  return parse_log(text::read_file(path_.string()).value_or(""));
}

std::vector<LeaderboardEntry> Leaderboard::standings(const std::string& stage) const {
  return grade::standings(read(), stage);
}

}  // namespace pacasm::grade
