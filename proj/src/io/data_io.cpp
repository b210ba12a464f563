#include "accmarket/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace accmarket {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? comma : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

Dataset sample_gaussian_market(const GaussianMarketSpec& spec, std::size_t m, std::uint64_t seed) {
  if (m == 0) throw std::invalid_argument("sample size must be at least 1");
  if (!(spec.sigma_neg > 0.0) || !(spec.sigma_pos > 0.0)) throw std::invalid_argument("sigmas must be positive");
  if (!(spec.prior >= 0.0 && spec.prior <= 1.0)) throw std::invalid_argument("prior must lie in [0, 1]");
  if (!std::isfinite(spec.a)) throw std::invalid_argument("a must be finite");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> xs(m);
  std::vector<Label> ys(m);
  for (std::size_t j = 0; j < m; ++j) {
    const bool pos = unit(rng) < spec.prior;
    ys[j] = pos ? kPositive : kNegative;
    xs[j] = pos ? spec.a + spec.sigma_pos * gauss(rng) : -spec.a + spec.sigma_neg * gauss(rng);
  }
  return Dataset(std::move(xs), 1, std::move(ys), "gaussian", {"x"});
}

Dataset parse_csv(std::istream& in, const std::string& label_column, const std::string& positive_label,
                  const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    header = split_fields(t);
    have_header = true;
    break;
  }
  if (!have_header) throw std::runtime_error(source + ": empty file (no header row)");

  const auto it = std::find(header.begin(), header.end(), label_column);
  if (it == header.end()) throw std::runtime_error(source + ": missing label column '" + label_column + "'");
  const std::size_t label_idx = static_cast<std::size_t>(it - header.begin());
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_idx) names.push_back(header[c]);
  }
  if (names.empty()) throw std::runtime_error(source + ": no feature columns besides the label");

  double positive_value = 0.0;
  const bool positive_numeric = parse_number(positive_label, positive_value);

  std::vector<double> flat;
  std::vector<Label> labels;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto fields = split_fields(t);
    if (fields.size() != header.size()) {
      throw std::runtime_error(source + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c == label_idx) {
        double v = 0.0;
        const bool pos = positive_numeric && parse_number(fields[c], v) ? v == positive_value
                                                                        : fields[c] == positive_label;
        labels.push_back(pos ? kPositive : kNegative);
        continue;
      }
      double v = 0.0;
      if (!parse_number(fields[c], v) || !std::isfinite(v)) {
        throw std::runtime_error(source + ":" + std::to_string(line_no) + ": column '" + header[c] + "' value '" +
                                 fields[c] + "' is not a finite number");
      }
      flat.push_back(v);
    }
  }
  if (labels.empty()) throw std::runtime_error(source + ": no data rows");
  const std::size_t dim = names.size();
  return Dataset(std::move(flat), dim, std::move(labels), source, std::move(names));
}

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 const std::string& positive_label) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_csv(in, label_column, positive_label, path.string());
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("failed to format a double");
  return std::string(buf, ptr);
}

std::string to_csv(const Dataset& data, const std::string& label_column, const std::vector<std::string>& comments) {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  for (std::size_t f = 0; f < data.dim(); ++f) {
    out += data.feature_names().empty() ? "x" + std::to_string(f) : data.feature_names()[f];
    out += ',';
  }
  out += label_column + "\n";
  for (std::size_t j = 0; j < data.size(); ++j) {
    for (std::size_t f = 0; f < data.dim(); ++f) {
      out += format_double(data.at(j, f));
      out += ',';
    }
    out += data.label(j) == kPositive ? "1\n" : "-1\n";
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_csv(const Dataset& data, const std::filesystem::path& path, const std::string& label_column,
               const std::vector<std::string>& comments) {
  write_file_atomic(path, to_csv(data, label_column, comments));
}

void SplitSpec::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test fraction must lie strictly between 0 and 1");
  }
}

SplitIndices split_indices(std::size_t m, const SplitSpec& spec) {
  spec.validate();
  if (m < 2) throw std::invalid_argument("splitting needs at least two examples");
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(spec.seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  auto n_train = static_cast<std::size_t>(std::ceil(static_cast<double>(m) * (1.0 - spec.test_fraction) - 1e-9));
  n_train = std::clamp<std::size_t>(n_train, 1, m - 1);
  SplitIndices out;
  out.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec) {
  const auto s = split_indices(data.size(), spec);
  return {data.select_rows(s.train, data.name() + "/train"), data.select_rows(s.test, data.name() + "/test")};
}

Dataset rebalance(const Dataset& data, double target, std::uint64_t seed) {
  if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("target positive ratio must lie in (0, 1)");
  const std::size_t m = data.size();
  const std::size_t pos = data.positives();
  const std::size_t neg = m - pos;
  if (pos == 0 || neg == 0) throw std::invalid_argument("rebalancing needs both classes present");

  const double ratio = static_cast<double>(pos) / static_cast<double>(m);
  if (std::abs(ratio - target) <= 1.0 / static_cast<double>(m)) return data;

  const bool grow_pos = ratio < target;
  const double k_real = grow_pos ? (target * static_cast<double>(m) - static_cast<double>(pos)) / (1.0 - target)
                                 : ((1.0 - target) * static_cast<double>(m) - static_cast<double>(neg)) / target;
  const auto k = static_cast<std::size_t>(std::llround(std::max(0.0, k_real)));

  std::vector<std::size_t> pool;
  for (std::size_t j = 0; j < m; ++j) {
    if ((data.label(j) == kPositive) == grow_pos) pool.push_back(j);
  }
  std::vector<std::size_t> rows(m);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (std::size_t t = 0; t < k; ++t) rows.push_back(pool[pick(rng)]);
  return data.select_rows(rows);
}

Dataset restrict_features(const Dataset& data, std::size_t k) { return data.prefix_features(k); }

Dataset subsample(const Dataset& data, std::size_t k, std::uint64_t seed) {
  if (k < 1 || k > data.size()) {
    throw std::invalid_argument("subsample size " + std::to_string(k) + " outside [1, " + std::to_string(data.size()) +
                            "]");
  }
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return data.select_rows(idx);
}

}  // namespace accmarket
