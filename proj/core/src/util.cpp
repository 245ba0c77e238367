#include "alignguard/util.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "alignguard/json.hpp"

#include "alignguard/errors.hpp"

namespace alignguard {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw Error("EVP_MD_CTX_new failed");
  bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
            EVP_DigestUpdate(ctx, data.data(), data.size()) == 1 &&
            EVP_DigestFinal_ex(ctx, digest, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error("sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string short_hash(std::string_view data) { return sha256_hex(data).substr(0, 16); }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<std::string> read_file_if_exists(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec) || ec) return std::nullopt;
  return read_file(path);
}

void atomic_write_file(const fs::path& path, std::string_view data) {
  fs::path dir = path.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for write: " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error("short write: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string canonical_dump(const Json& doc) {
  // nlohmann::json objects iterate in key order already (std::map).
  return doc.dump(2) + "\n";
}

Json parse_json(std::string_view text, const std::string& what) {
  Json doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw FormatError("malformed JSON in " + what);
  return doc;
}

Json load_json_file(const fs::path& path) {
  return parse_json(read_file(path), path.string());
}

void save_json_file(const fs::path& path, const Json& doc) {
  atomic_write_file(path, canonical_dump(doc));
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

namespace {

// Longest-common-subsequence table over lines. Quadratic, fine for the
// test-file sizes this project diffs.
std::vector<std::pair<int, int>> lcs_pairs(const std::vector<std::string>& a,
                                           const std::vector<std::string>& b) {
  size_t n = a.size(), m = b.size();
  std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
  for (size_t i = n; i-- > 0;) {
    for (size_t j = m; j-- > 0;) {
      dp[i][j] = (a[i] == b[j]) ? dp[i + 1][j + 1] + 1
                                : std::max(dp[i + 1][j], dp[i][j + 1]);
    }
  }
  std::vector<std::pair<int, int>> pairs;
  size_t i = 0, j = 0;
  while (i < n && j < m) {
    if (a[i] == b[j]) {
      pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
      ++i;
      ++j;
    } else if (dp[i + 1][j] >= dp[i][j + 1]) {
      ++i;
    } else {
      ++j;
    }
  }
  return pairs;
}

}  // namespace

std::string unified_diff(const std::string& before, const std::string& after,
                         const std::string& before_name, const std::string& after_name) {
  if (before == after) return "";
  auto a = split_lines(before);
  auto b = split_lines(after);
  auto common = lcs_pairs(a, b);
  std::ostringstream out;
  out << "--- " << before_name << "\n+++ " << after_name << "\n";
  size_t i = 0, j = 0, k = 0;
  out << "@@ -1," << a.size() << " +1," << b.size() << " @@\n";
  while (i < a.size() || j < b.size()) {
    if (k < common.size() && static_cast<int>(i) == common[k].first &&
        static_cast<int>(j) == common[k].second) {
      out << ' ' << a[i] << '\n';
      ++i;
      ++j;
      ++k;
    } else if (k < common.size() ? static_cast<int>(i) < common[k].first
                                 : i < a.size()) {
      out << '-' << a[i] << '\n';
      ++i;
    } else if (j < b.size()) {
      out << '+' << b[j] << '\n';
      ++j;
    }
  }
  return out.str();
}

std::vector<std::string> diff_added_lines(const std::string& diff) {
  std::vector<std::string> added;
  for (const auto& line : split_lines(diff)) {
    if (starts_with(line, "+++")) continue;
    if (!line.empty() && line[0] == '+') added.push_back(line.substr(1));
  }
  return added;
}

std::vector<std::string> called_names(const std::string& source) {
  std::vector<std::string> names;
  const size_t n = source.size();
  size_t i = 0;
  auto is_ident = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  };
  while (i < n) {
    if (std::isalpha(static_cast<unsigned char>(source[i])) || source[i] == '_') {
      size_t start = i;
      while (i < n && is_ident(source[i])) ++i;
      // Walk dotted chains, keeping the last segment.
      size_t last_start = start, last_end = i;
      while (i < n && source[i] == '.') {
        ++i;
        size_t seg = i;
        while (i < n && is_ident(source[i])) ++i;
        if (i > seg) {
          last_start = seg;
          last_end = i;
        }
      }
      size_t j = i;
      while (j < n && (source[j] == ' ' || source[j] == '\t')) ++j;
      if (j < n && source[j] == '(') {
        std::string name = source.substr(last_start, last_end - last_start);
        static const char* keywords[] = {"if",    "while", "for",  "return",
                                         "def",   "class", "not",  "and",
                                         "or",    "in",    "else", "elif",
                                         "print", "assert"};
        bool kw = std::any_of(std::begin(keywords), std::end(keywords),
                              [&](const char* k) { return name == k; });
        if (!kw) names.push_back(name);
      }
    } else {
      ++i;
    }
  }
  return names;
}

int compare_versions(const std::string& a, const std::string& b) {
  auto split = [](const std::string& v) {
    std::vector<std::string> segs;
    std::string cur;
    for (char c : v) {
      if (c == '.') {
        segs.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    segs.push_back(cur);
    return segs;
  };
  auto sa = split(a), sb = split(b);
  for (size_t i = 0; i < std::max(sa.size(), sb.size()); ++i) {
    std::string x = i < sa.size() ? sa[i] : "0";
    std::string y = i < sb.size() ? sb[i] : "0";
    bool nx = !x.empty() && std::all_of(x.begin(), x.end(), ::isdigit);
    bool ny = !y.empty() && std::all_of(y.begin(), y.end(), ::isdigit);
    if (nx && ny) {
      long vx = std::stol(x), vy = std::stol(y);
      if (vx != vy) return vx < vy ? -1 : 1;
    } else if (x != y) {
      return x < y ? -1 : 1;
    }
  }
  return 0;
}

std::uint64_t DeterministicRng::next() {
  // splitmix64
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t DeterministicRng::next_below(std::uint64_t bound) {
  if (bound == 0) throw PreconditionError("next_below: bound must be positive");
  std::uint64_t limit = ~0ULL - (~0ULL % bound);
  std::uint64_t v;
  do {
    v = next();
  } while (v > limit);
  return v % bound;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace alignguard
