#include "statedrift/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "statedrift/error.hpp"

namespace statedrift {
namespace {

Error io_error(const std::string& what, const fs::path& path) {
  return Error(ErrorKind::Io,
               what + " " + path.string() + ": " + std::strerror(errno));
}

Error corrupt(const fs::path& path, std::size_t line, const std::string& why) {
  return Error(ErrorKind::CorruptStore, path.string() + ":" +
                                            std::to_string(line) + ": " + why);
}

// Splits on '\n'. Requires a trailing newline on non-empty input and rejects
// CR so the on-disk form stays canonical.
std::vector<std::string_view> split_lines(std::string_view text,
                                          const fs::path& path) {
  std::vector<std::string_view> lines;
  if (text.empty()) return lines;
  if (text.back() != '\n') throw corrupt(path, 0, "missing final newline");
  if (text.find('\r') != std::string_view::npos) {
    throw corrupt(path, 0, "CR line ending");
  }
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

template <typename Int>
bool parse_uint(std::string_view s, Int& out) {
  if (s.empty() || s.front() < '0' || s.front() > '9') return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    out.push_back(s.substr(pos, next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

bool is_hex_digest(std::string_view s) {
  if (s.size() != 64) return false;
  for (char c : s) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

void write_all(int fd, std::string_view content, const fs::path& path) {
  const char* p = content.data();
  std::size_t left = content.size();
  while (left > 0) {
    const ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw io_error("write", path);
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
}

}  // namespace

std::string format_fixed(double v, int precision) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::fixed, precision);
  return std::string(buf, ptr);
}

bool same_content(const RunRecord& a, const RunRecord& b) {
  return a.run_index == b.run_index && a.tokens_seen == b.tokens_seen &&
         a.vocab_size == b.vocab_size && a.similarity == b.similarity &&
         a.perturbation == b.perturbation;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw io_error("cannot read", path);
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC,
                        0644);
  if (fd < 0) throw io_error("cannot create", tmp);
  try {
    write_all(fd, content, tmp);
    if (::fsync(fd) != 0) throw io_error("fsync", tmp);
  } catch (...) {
    ::close(fd);
    ::unlink(tmp.c_str());
    throw;
  }
  ::close(fd);
  if (::rename(tmp.c_str(), path.c_str()) != 0) {
    const int saved = errno;
    ::unlink(tmp.c_str());
    errno = saved;
    throw io_error("rename onto", path);
  }
}

// ---- state ---------------------------------------------------------------

std::string serialize_state(const StateVector& state) {
  std::string out;
  out += kStateHeader;
  out += "\ntotal " + std::to_string(state.total_tokens());
  out += "\nvocab " + std::to_string(state.vocab_size()) + "\n";
  for (const auto& [token, n] : state.counts()) {
    out += token;
    out += ' ';
    out += std::to_string(n);
    out += '\n';
  }
  return out;
}

StateVector parse_state(std::string_view text) {
  const fs::path where("<state>");
  const auto lines = split_lines(text, where);
  if (lines.size() < 3 || lines[0] != kStateHeader) {
    throw corrupt(where, 1, "bad header");
  }
  Count total = 0;
  std::size_t vocab = 0;
  if (!lines[1].starts_with("total ") ||
      !parse_uint(lines[1].substr(6), total)) {
    throw corrupt(where, 2, "bad total line");
  }
  if (!lines[2].starts_with("vocab ") ||
      !parse_uint(lines[2].substr(6), vocab)) {
    throw corrupt(where, 3, "bad vocab line");
  }

  CountMap counts;
  for (std::size_t i = 3; i < lines.size(); ++i) {
    const auto line = lines[i];
    const std::size_t sp = line.rfind(' ');
    if (sp == std::string_view::npos || sp == 0) {
      throw corrupt(where, i + 1, "expected 'token count'");
    }
    const std::string_view token = line.substr(0, sp);
    Count n = 0;
    if (!parse_uint(line.substr(sp + 1), n) || n == 0) {
      throw corrupt(where, i + 1, "count must be a positive integer");
    }
    if (!counts.empty() && !(counts.rbegin()->first < token)) {
      throw corrupt(where, i + 1, "keys not strictly sorted");
    }
    counts.emplace_hint(counts.end(), std::string(token), n);
  }
  if (counts.size() != vocab) {
    throw corrupt(where, 3, "declared vocab does not match entries");
  }

  StateVector state;
  try {
    state = StateVector::from_counts(std::move(counts));
  } catch (const Error& e) {
    throw Error(ErrorKind::CorruptStore, std::string("<state>: ") + e.what());
  }
  if (state.total_tokens() != total) {
    throw corrupt(where, 2, "declared total " + std::to_string(total) +
                                " but counts sum to " +
                                std::to_string(state.total_tokens()));
  }
  return state;
}

StateVector load_state(const fs::path& path) {
  if (!fs::exists(path)) return new_state();
  try {
    return parse_state(read_file(path));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::CorruptStore) throw;
    throw Error(ErrorKind::CorruptStore, path.string() + ": " + e.what());
  }
}

void save_state(const fs::path& path, const StateVector& state) {
  write_file_atomic(path, serialize_state(state));
}

// ---- history -------------------------------------------------------------

std::string format_run_record(const RunRecord& r) {
  std::string out = std::to_string(r.run_index);
  out += ',';
  out += r.timestamp;
  out += ',' + std::to_string(r.tokens_seen);
  out += ',' + std::to_string(r.vocab_size);
  out += ',' + format_fixed(r.similarity, 6);
  out += r.perturbation ? ",1" : ",0";
  return out;
}

HistoryLog load_history(const fs::path& path) {
  HistoryLog log;
  if (!fs::exists(path)) return log;
  const std::string text = read_file(path);
  const auto lines = split_lines(text, path);
  if (lines.empty()) return log;
  if (lines[0] != kHistoryHeader) throw corrupt(path, 1, "bad header");

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split(lines[i], ',');
    if (fields.size() != 6) throw corrupt(path, i + 1, "expected 6 fields");
    RunRecord r;
    r.timestamp = std::string(fields[1]);
    double sim = 0.0;
    auto [ptr, ec] = std::from_chars(
        fields[4].data(), fields[4].data() + fields[4].size(), sim,
        std::chars_format::fixed);
    if (!parse_uint(fields[0], r.run_index) ||
        !parse_uint(fields[2], r.tokens_seen) ||
        !parse_uint(fields[3], r.vocab_size) || ec != std::errc() ||
        ptr != fields[4].data() + fields[4].size() || r.timestamp.empty() ||
        (fields[5] != "0" && fields[5] != "1")) {
      throw corrupt(path, i + 1, "malformed row");
    }
    if (!(sim >= 0.0 && sim <= 1.0)) {
      throw corrupt(path, i + 1, "similarity outside [0, 1]");
    }
    r.similarity = sim;
    r.perturbation = fields[5] == "1";
    if (r.run_index != log.size() + 1) {
      throw corrupt(path, i + 1, "run index not contiguous");
    }
    if (!log.empty() && (r.tokens_seen < log.back().tokens_seen ||
                         r.vocab_size < log.back().vocab_size)) {
      throw corrupt(path, i + 1, "token or vocabulary count decreased");
    }
    log.push_back(std::move(r));
  }
  return log;
}

void append_run_record(const fs::path& path, const RunRecord& record) {
  const HistoryLog log = load_history(path);
  const std::uint64_t expected = log.size() + 1;
  if (record.run_index != expected) {
    throw Error(ErrorKind::Sequence,
                "run index " + std::to_string(record.run_index) +
                    " does not follow last recorded run " +
                    std::to_string(log.size()));
  }
  if (record.timestamp.empty() ||
      record.timestamp.find(',') != std::string::npos) {
    throw Error(ErrorKind::Validation, "timestamp must be non-empty, no commas");
  }
  const std::string row = format_run_record(record) + "\n";
  if (!fs::exists(path) || fs::file_size(path) == 0) {
    write_file_atomic(path, std::string(kHistoryHeader) + "\n" + row);
    return;
  }
  const int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CLOEXEC);
  if (fd < 0) throw io_error("cannot open", path);
  try {
    write_all(fd, row, path);
    if (::fsync(fd) != 0) throw io_error("fsync", path);
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
}

// ---- manifest ------------------------------------------------------------

std::string serialize_manifest(const Manifest& manifest) {
  std::vector<std::pair<const std::string*, const ManifestEntry*>> rows;
  rows.reserve(manifest.size());
  for (const auto& [id, entry] : manifest) rows.emplace_back(&id, &entry);
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.second->run_index < b.second->run_index;
  });
  std::string out;
  for (const auto& [id, entry] : rows) {
    out += entry->digest + "  " + std::to_string(entry->run_index) + "  " +
           *id + "\n";
  }
  return out;
}

Manifest parse_manifest(std::string_view text) {
  const fs::path where("<manifest>");
  Manifest m;
  const auto lines = split_lines(text, where);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = lines[i];
    const std::size_t a = line.find("  ");
    const std::size_t b =
        a == std::string_view::npos ? a : line.find("  ", a + 2);
    if (b == std::string_view::npos) {
      throw corrupt(where, i + 1, "expected 'digest  run  path'");
    }
    const auto digest = line.substr(0, a);
    const auto run = line.substr(a + 2, b - a - 2);
    const auto id = line.substr(b + 2);
    ManifestEntry entry{std::string(digest), 0};
    if (!is_hex_digest(digest) || !parse_uint(run, entry.run_index) ||
        entry.run_index == 0 || id.empty()) {
      throw corrupt(where, i + 1, "malformed entry");
    }
    if (!m.emplace(std::string(id), std::move(entry)).second) {
      throw corrupt(where, i + 1, "duplicate document id");
    }
  }
  return m;
}

Manifest load_manifest(const fs::path& path) {
  if (!fs::exists(path)) return {};
  try {
    return parse_manifest(read_file(path));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::CorruptStore) throw;
    throw Error(ErrorKind::CorruptStore, path.string() + ": " + e.what());
  }
}

void save_manifest(const fs::path& path, const Manifest& manifest) {
  write_file_atomic(path, serialize_manifest(manifest));
}

// ---- lock ----------------------------------------------------------------

RunLock::RunLock(const fs::path& lock_file) {
  fd_ = ::open(lock_file.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw io_error("cannot open lock file", lock_file);
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    const int saved = errno;
    ::close(fd_);
    fd_ = -1;
    if (saved == EWOULDBLOCK) {
      throw Error(ErrorKind::LockHeld,
                  "another run holds " + lock_file.string());
    }
    errno = saved;
    throw io_error("flock", lock_file);
  }
}

RunLock::~RunLock() { release(); }

RunLock::RunLock(RunLock&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

RunLock& RunLock::operator=(RunLock&& other) noexcept {
  if (this != &other) {
    release();
    fd_ = other.fd_;
    other.fd_ = -1;
  }
  return *this;
}

void RunLock::release() noexcept {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
    fd_ = -1;
  }
}

void init_store(const StorePaths& paths) {
  std::error_code ec;
  fs::create_directories(paths.root, ec);
  if (ec) {
    throw Error(ErrorKind::Io, "cannot create " + paths.root.string() + ": " +
                                   ec.message());
  }
  if (!fs::exists(paths.state())) save_state(paths.state(), new_state());
  if (!fs::exists(paths.history())) {
    write_file_atomic(paths.history(), std::string(kHistoryHeader) + "\n");
  }
  if (!fs::exists(paths.manifest())) save_manifest(paths.manifest(), {});
}

}  // namespace statedrift
