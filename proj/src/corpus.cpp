#include "statedrift/corpus.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <set>

#include "statedrift/error.hpp"

namespace statedrift {
namespace {

using nlohmann::json;

Error invalid(const std::string& what) {
  return Error(ErrorKind::Validation, "corpus spec: " + what);
}

// SplitMix64 (Steele, Lea, Flood 2014). Fixed constants, so streams are
// identical on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform in [0, 1) with 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

enum class Stream : std::uint64_t { Base = 1, Perturbation = 2, Layout = 3 };

// Independent stream per (seed, run, doc, purpose).
SplitMix64 stream_for(std::uint64_t seed, std::uint64_t run, std::uint64_t doc,
                      Stream purpose) {
  std::uint64_t h = SplitMix64::mix(seed);
  for (std::uint64_t v : {run, doc, static_cast<std::uint64_t>(purpose)}) {
    h = SplitMix64::mix(h ^ (v + 0x9e3779b97f4a7c15ULL));
  }
  return SplitMix64(h);
}

template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.below(i)]);
  }
}

// Cumulative rank-inverse weights, last element exactly 1.
std::vector<double> zipf_cdf(std::uint32_t size, double exponent) {
  std::vector<double> cdf(size);
  double sum = 0.0;
  for (std::uint32_t r = 0; r < size; ++r) {
    sum += 1.0 / std::pow(static_cast<double>(r + 1), exponent);
    cdf[r] = sum;
  }
  for (auto& c : cdf) c /= sum;
  cdf.back() = 1.0;
  return cdf;
}

// Stratified inverse-CDF sampling: one jittered uniform per stratum
// [i/n, (i+1)/n), then shuffled. Keeps each document close to the pool's
// rank profile while still sampling its tail.
std::vector<std::uint32_t> draw_ranks(const std::vector<double>& cdf,
                                      std::uint32_t n, SplitMix64& rng) {
  std::vector<std::uint32_t> ranks;
  ranks.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const double u = (static_cast<double>(i) + rng.uniform()) / n;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    ranks.push_back(static_cast<std::uint32_t>(
        std::min<std::ptrdiff_t>(it - cdf.begin(), cdf.size() - 1)));
  }
  shuffle(ranks, rng);
  return ranks;
}

std::vector<std::string> make_pool(std::uint32_t size,
                                   std::string_view consonants) {
  static constexpr std::string_view kVowels = "aeiou";
  std::vector<std::string> syllables;
  for (char c : consonants) {
    for (char v : kVowels) syllables.push_back({c, v});
  }
  const std::uint64_t base = syllables.size();
  std::vector<std::string> words;
  words.reserve(size);
  for (std::uint64_t i = 0; i < size; ++i) {
    // Little-endian base-|syllables| digits, at least two syllables.
    std::string w;
    std::uint64_t rest = i;
    int digits = 0;
    while (digits < 2 || rest > 0) {
      w += syllables[rest % base];
      rest /= base;
      ++digits;
    }
    words.push_back(std::move(w));
  }
  return words;
}

std::string two_digits(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%02llu", static_cast<unsigned long long>(v));
  return buf;
}

std::string render(const std::vector<std::string>& tokens) {
  std::string text;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    text += tokens[i];
    text += (i + 1) % 12 == 0 || i + 1 == tokens.size() ? '\n' : ' ';
  }
  return text;
}

constexpr std::uint32_t kMaxPool = 1'000'000;

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error(ErrorKind::Io, "SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xf];
  }
  return out;
}

std::vector<Document> scan_new_documents(const fs::path& corpus_root,
                                         const Manifest& manifest) {
  std::error_code ec;
  if (!fs::is_directory(corpus_root, ec)) {
    throw Error(ErrorKind::Io,
                "corpus root " + corpus_root.string() + " is not a directory");
  }
  for (const auto& [id, entry] : manifest) {
    const fs::path p = corpus_root / id;
    if (!fs::is_regular_file(p, ec)) {
      throw Error(ErrorKind::DigestMismatch,
                  "previously ingested document " + id + " is missing");
    }
    if (sha256_hex(read_file(p)) != entry.digest) {
      throw Error(ErrorKind::DigestMismatch,
                  "previously ingested document " + id + " has changed");
    }
  }

  std::vector<Document> docs;
  for (auto it = fs::recursive_directory_iterator(corpus_root, ec);
       it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) break;
    if (!it->is_regular_file() || it->path().extension() != ".txt") continue;
    std::string id = it->path().lexically_relative(corpus_root).generic_string();
    if (manifest.contains(id)) continue;
    docs.push_back({std::move(id), read_file(it->path())});
  }
  if (ec) {
    throw Error(ErrorKind::Io, "scanning " + corpus_root.string() + ": " +
                                   ec.message());
  }
  std::sort(docs.begin(), docs.end(),
            [](const Document& a, const Document& b) { return a.id < b.id; });
  return docs;
}

CorpusSpec default_protocol_spec() {
  CorpusSpec spec;
  for (std::uint32_t n : {48u, 38u, 33u, 34u}) spec.runs.push_back({1, n});
  spec.runs.push_back({1, 240, Pool::Perturbation, 0.0});
  for (std::uint32_t n : {37u, 34u, 33u}) spec.runs.push_back({1, n});
  spec.phases = {{"plastic", 1, 3},
                 {"stable", 3, 4},
                 {"perturbation", 4, 5},
                 {"recovery", 5, 8}};
  return spec;
}

void validate(const CorpusSpec& spec) {
  if (spec.runs.empty()) throw invalid("no runs");
  if (spec.runs.size() > 99) throw invalid("more than 99 runs");
  bool uses_perturbation = false;
  for (std::size_t i = 0; i < spec.runs.size(); ++i) {
    const RunRecipe& r = spec.runs[i];
    const std::string where = "run " + std::to_string(i + 1) + ": ";
    if (r.doc_count < 1 || r.doc_count > 99) {
      throw invalid(where + "doc_count must be in 1..99");
    }
    if (r.tokens_per_doc < 1) throw invalid(where + "tokens_per_doc must be >= 1");
    if (!(r.overlap >= 0.0 && r.overlap <= 1.0)) {
      throw invalid(where + "overlap outside [0, 1]");
    }
    if (r.pool == Pool::Perturbation && r.overlap < 1.0) uses_perturbation = true;
  }
  if (spec.base_pool_size < 1 || spec.base_pool_size > kMaxPool) {
    throw invalid("base pool exhausted: size must be in 1.." +
                  std::to_string(kMaxPool));
  }
  if (uses_perturbation &&
      (spec.perturbation_pool_size < 1 || spec.perturbation_pool_size > kMaxPool)) {
    throw invalid("perturbation pool exhausted: size must be in 1.." +
                  std::to_string(kMaxPool));
  }
  for (double e : {spec.base_zipf_exponent, spec.perturbation_zipf_exponent}) {
    if (!std::isfinite(e) || e < 0.0) throw invalid("zipf exponent must be >= 0");
  }
  std::set<std::string> names;
  for (const auto& p : spec.phases) {
    if (p.name.empty()) throw invalid("phase with empty name");
    if (!names.insert(p.name).second) throw invalid("duplicate phase " + p.name);
    if (p.t1 < 1 || p.t1 >= p.t2 || p.t2 > spec.runs.size()) {
      throw invalid("phase " + p.name + " must satisfy 1 <= t1 < t2 <= runs");
    }
  }
}

CorpusSpec parse_corpus_spec(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw invalid(e.what());
  }
  if (!j.is_object()) throw invalid("top level must be an object");

  static const std::set<std::string> kKeys = {
      "seed", "base_pool_size", "perturbation_pool_size", "base_zipf_exponent",
      "perturbation_zipf_exponent", "runs", "phases"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.contains(key)) throw invalid("unknown key '" + key + "'");
  }

  CorpusSpec spec;
  spec.phases.clear();
  try {
    spec.seed = j.value("seed", spec.seed);
    spec.base_pool_size = j.value("base_pool_size", spec.base_pool_size);
    spec.perturbation_pool_size =
        j.value("perturbation_pool_size", spec.perturbation_pool_size);
    spec.base_zipf_exponent =
        j.value("base_zipf_exponent", spec.base_zipf_exponent);
    spec.perturbation_zipf_exponent =
        j.value("perturbation_zipf_exponent", spec.perturbation_zipf_exponent);
    for (const auto& r : j.at("runs")) {
      RunRecipe recipe;
      recipe.doc_count = r.value("doc_count", 1u);
      recipe.tokens_per_doc = r.at("tokens_per_doc").get<std::uint32_t>();
      const std::string pool = r.value("pool", std::string("base"));
      if (pool == "base") {
        recipe.pool = Pool::Base;
      } else if (pool == "perturbation") {
        recipe.pool = Pool::Perturbation;
      } else {
        throw invalid("unknown pool '" + pool + "'");
      }
      recipe.overlap = r.value("overlap", 0.0);
      spec.runs.push_back(recipe);
    }
    if (j.contains("phases")) {
      for (const auto& p : j.at("phases")) {
        spec.phases.push_back({p.at("name").get<std::string>(),
                               p.at("t1").get<std::uint64_t>(),
                               p.at("t2").get<std::uint64_t>()});
      }
    }
  } catch (const json::exception& e) {
    throw invalid(e.what());
  }
  validate(spec);
  return spec;
}

CorpusSpec load_corpus_spec(const fs::path& path) {
  return parse_corpus_spec(read_file(path));
}

std::string to_json(const CorpusSpec& spec) {
  json j;
  j["seed"] = spec.seed;
  j["base_pool_size"] = spec.base_pool_size;
  j["perturbation_pool_size"] = spec.perturbation_pool_size;
  j["base_zipf_exponent"] = spec.base_zipf_exponent;
  j["perturbation_zipf_exponent"] = spec.perturbation_zipf_exponent;
  j["runs"] = json::array();
  for (const auto& r : spec.runs) {
    j["runs"].push_back({{"doc_count", r.doc_count},
                         {"tokens_per_doc", r.tokens_per_doc},
                         {"pool", r.pool == Pool::Base ? "base" : "perturbation"},
                         {"overlap", r.overlap}});
  }
  j["phases"] = json::array();
  for (const auto& p : spec.phases) {
    j["phases"].push_back({{"name", p.name}, {"t1", p.t1}, {"t2", p.t2}});
  }
  return j.dump(2) + "\n";
}

std::vector<std::string> base_pool(std::uint32_t size) {
  return make_pool(size, "bdfgklmn");
}

std::vector<std::string> perturbation_pool(std::uint32_t size) {
  return make_pool(size, "prstvz");
}

std::vector<GeneratedDocument> generate_corpus(const CorpusSpec& spec) {
  validate(spec);
  const auto base_words = base_pool(spec.base_pool_size);
  const auto base_cdf = zipf_cdf(spec.base_pool_size, spec.base_zipf_exponent);
  std::vector<std::string> pert_words;
  std::vector<double> pert_cdf;
  if (spec.perturbation_pool_size > 0) {
    pert_words = perturbation_pool(spec.perturbation_pool_size);
    pert_cdf = zipf_cdf(spec.perturbation_pool_size,
                        spec.perturbation_zipf_exponent);
  }

  std::vector<GeneratedDocument> out;
  for (std::size_t ri = 0; ri < spec.runs.size(); ++ri) {
    const RunRecipe& recipe = spec.runs[ri];
    const std::uint64_t run = ri + 1;
    for (std::uint32_t d = 1; d <= recipe.doc_count; ++d) {
      const std::uint32_t n = recipe.tokens_per_doc;
      auto base_rng = stream_for(spec.seed, run, d, Stream::Base);
      const auto base_ranks = draw_ranks(base_cdf, n, base_rng);

      std::vector<std::string> tokens(n);
      if (recipe.pool == Pool::Base) {
        for (std::uint32_t i = 0; i < n; ++i) tokens[i] = base_words[base_ranks[i]];
      } else {
        // Positions layout[0..k) take base draws 0..k; the rest take
        // perturbation draws k..n. Raising the overlap only swaps
        // perturbation tokens for base tokens.
        const auto k = static_cast<std::uint32_t>(
            std::floor(recipe.overlap * n + 0.5));
        std::vector<std::uint32_t> pert_ranks;
        if (k < n) {
          auto pert_rng = stream_for(spec.seed, run, d, Stream::Perturbation);
          pert_ranks = draw_ranks(pert_cdf, n, pert_rng);
        }
        std::vector<std::uint32_t> layout(n);
        for (std::uint32_t i = 0; i < n; ++i) layout[i] = i;
        auto layout_rng = stream_for(spec.seed, run, d, Stream::Layout);
        shuffle(layout, layout_rng);
        for (std::uint32_t j = 0; j < n; ++j) {
          tokens[layout[j]] =
              j < k ? base_words[base_ranks[j]] : pert_words[pert_ranks[j]];
        }
      }
      out.push_back({run,
                     {"day" + two_digits(run) + "_doc" + two_digits(d) + ".txt",
                      render(tokens)}});
    }
  }
  return out;
}

void write_corpus(const fs::path& out_dir,
                  const std::vector<GeneratedDocument>& docs) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorKind::Io,
                "cannot create " + out_dir.string() + ": " + ec.message());
  }
  for (const auto& g : docs) write_file_atomic(out_dir / g.doc.id, g.doc.text);
}

}  // namespace statedrift
