#include "dataagent/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "dataagent/rng.hpp"

namespace da {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string split_path(const std::string& path) { return path + ".split"; }

std::vector<std::string> split_line(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, std::size_t line_no, std::size_t field) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing chars");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("non-numeric cell '" + s + "' at line " + std::to_string(line_no) +
                             ", field " + std::to_string(field + 1));
  }
}

}  // namespace

Matrix Dataset::gather_features(const std::vector<std::size_t>& ids) const {
  Matrix out(ids.size(), features.cols);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const double* src = features.row(ids[i]);
    std::copy(src, src + features.cols, out.row(i));
  }
  return out;
}

std::vector<std::size_t> Dataset::gather_labels(const std::vector<std::size_t>& ids) const {
  std::vector<std::size_t> out(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) out[i] = labels[ids[i]];
  return out;
}

bool operator==(const Dataset& a, const Dataset& b) {
  return a.features == b.features && a.labels == b.labels && a.class_count == b.class_count &&
         a.consistency == b.consistency && a.train_ids == b.train_ids && a.test_ids == b.test_ids;
}

Dataset gen_mixture(const MixtureSpec& spec) {
  if (spec.components.empty()) throw std::invalid_argument("gen_mixture: no components");
  std::size_t classes = 0, dim = spec.components[0].center.size();
  std::size_t n_train = 0, n_test = 0;
  for (const auto& c : spec.components) {
    if (c.center.size() != dim) throw std::invalid_argument("gen_mixture: mixed center dims");
    if (c.std_dev <= 0.0) throw std::invalid_argument("gen_mixture: std must be > 0");
    classes = std::max(classes, c.label + 1);
    n_train += c.train_count;
    n_test += c.test_count;
  }

  Dataset d;
  d.features = Matrix(n_train + n_test, dim);
  d.labels.resize(n_train + n_test);
  d.class_count = classes;
  d.source = "mixture";
  Rng rng(spec.seed);

  std::size_t row = 0;
  auto emit = [&](const MixtureComponent& c, std::size_t count, std::vector<std::size_t>& ids) {
    for (std::size_t i = 0; i < count; ++i) {
      double* f = d.features.row(row);
      for (std::size_t k = 0; k < dim; ++k) f[k] = rng.normal(c.center[k], c.std_dev);
      d.labels[row] = c.label;
      ids.push_back(row);
      ++row;
    }
  };
  for (const auto& c : spec.components) emit(c, c.train_count, d.train_ids);
  for (const auto& c : spec.components) emit(c, c.test_count, d.test_ids);
  return d;
}

MixtureSpec default_benchmark_spec(std::uint64_t seed) {
  // Alternating common/rare classes on a circle. The rare classes are slightly
  // broader, so they stay high-loss but label-consistent: selection strategies
  // that mine hard samples get genuine headroom over a uniform subset without
  // the degenerate regime where top-loss selection memorizes aliased overlap.
  MixtureSpec spec;
  spec.seed = seed;
  const double radius = 2.0;
  for (std::size_t k = 0; k < 8; ++k) {
    const double a = kTwoPi * static_cast<double>(k) / 8.0;
    const bool common = k % 2 == 0;
    spec.components.push_back({k,
                               {radius * std::cos(a), radius * std::sin(a)},
                               common ? 0.45 : 0.50,
                               common ? std::size_t{1700} : std::size_t{300},
                               250});
  }
  return spec;
}

Dataset gen_rings(std::size_t train_per_class, std::size_t test_per_class, std::uint64_t seed) {
  const std::size_t n = 2 * (train_per_class + test_per_class);
  Dataset d;
  d.features = Matrix(n, 2);
  d.labels.resize(n);
  d.class_count = 2;
  d.source = "rings";
  Rng rng(seed);
  std::size_t row = 0;
  auto emit = [&](std::size_t label, std::size_t count, std::vector<std::size_t>& ids) {
    const double base_r = label == 0 ? 1.0 : 2.0;
    for (std::size_t i = 0; i < count; ++i) {
      const double a = rng.uniform(0.0, kTwoPi);
      const double r = rng.normal(base_r, 0.18);
      d.features.at(row, 0) = r * std::cos(a);
      d.features.at(row, 1) = r * std::sin(a);
      d.labels[row] = label;
      ids.push_back(row);
      ++row;
    }
  };
  for (std::size_t label = 0; label < 2; ++label) emit(label, train_per_class, d.train_ids);
  for (std::size_t label = 0; label < 2; ++label) emit(label, test_per_class, d.test_ids);
  return d;
}

std::vector<std::size_t> inject_label_noise(Dataset& dataset, const NoiseSpec& noise) {
  if (noise.flip_rate >= 1.0 || noise.flip_rate < 0.0) {
    throw std::invalid_argument("inject_label_noise: flip_rate must be in [0, 1)");
  }
  if (dataset.class_count < 2) throw std::invalid_argument("inject_label_noise: need C >= 2");

  Rng rng(noise.seed);
  const std::size_t n_train = dataset.train_ids.size();
  const auto flips = static_cast<std::size_t>(
      std::llround(noise.flip_rate * static_cast<double>(n_train)));

  std::vector<std::size_t> pool = dataset.train_ids;
  for (std::size_t i = 0; i < flips; ++i) {
    std::swap(pool[i], pool[i + rng.below(n_train - i)]);
  }
  std::vector<std::size_t> flipped(pool.begin(), pool.begin() + flips);
  std::sort(flipped.begin(), flipped.end());

  std::vector<char> is_flipped(dataset.size(), 0);
  for (std::size_t id : flipped) is_flipped[id] = 1;
  for (std::size_t id : flipped) {
    std::size_t other = rng.below(dataset.class_count - 1);
    if (other >= dataset.labels[id]) ++other;
    dataset.labels[id] = other;
  }

  std::vector<double> cons(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const double base = is_flipped[i] ? 0.0 : 1.0;
    cons[i] = std::clamp(base + rng.normal(0.0, noise.consistency_noise_std), 0.0, 1.0);
  }
  dataset.consistency = std::move(cons);
  return flipped;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_dataset: cannot open " + path);
  const bool has_cons = dataset.consistency.has_value();
  out << "# dims: " << dataset.size() << ' ' << dataset.dim() << ' ' << dataset.class_count
      << ' ' << (has_cons ? 1 : 0) << '\n';
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out << i << ',' << dataset.labels[i];
    if (has_cons) out << ',' << format_double((*dataset.consistency)[i]);
    const double* f = dataset.features.row(i);
    for (std::size_t k = 0; k < dataset.dim(); ++k) out << ',' << format_double(f[k]);
    out << '\n';
  }
  std::ofstream split(split_path(path));
  if (!split) throw std::runtime_error("save_dataset: cannot open " + split_path(path));
  for (std::size_t id : dataset.train_ids) split << id << '\n';
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_dataset: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_dataset: empty file " + path);
  std::size_t n = 0, d = 0, c = 0;
  int has_cons = 0;
  {
    std::istringstream hdr(line);
    std::string hash, dims;
    hdr >> hash >> dims >> n >> d >> c >> has_cons;
    if (hash != "#" || dims != "dims:" || hdr.fail()) {
      throw std::runtime_error("load_dataset: bad header at line 1: '" + line + "'");
    }
  }

  Dataset ds;
  ds.features = Matrix(n, d);
  ds.labels.resize(n);
  ds.class_count = c;
  ds.source = path;
  if (has_cons) ds.consistency = std::vector<double>(n);

  const std::size_t expect_fields = 2 + (has_cons ? 1 : 0) + d;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) {
      throw std::runtime_error("load_dataset: truncated at line " + std::to_string(i + 2));
    }
    auto fields = split_line(line, ',');
    const std::size_t line_no = i + 2;
    if (fields.size() != expect_fields) {
      throw std::runtime_error("load_dataset: line " + std::to_string(line_no) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(expect_fields));
    }
    const auto id = static_cast<std::size_t>(parse_double(fields[0], line_no, 0));
    if (id != i) {
      throw std::runtime_error("load_dataset: line " + std::to_string(line_no) +
                               " id out of order");
    }
    const double label = parse_double(fields[1], line_no, 1);
    if (label < 0 || label >= static_cast<double>(c) || label != std::floor(label)) {
      throw std::runtime_error("load_dataset: line " + std::to_string(line_no) + " label " +
                               fields[1] + " out of range [0, " + std::to_string(c) + ")");
    }
    ds.labels[i] = static_cast<std::size_t>(label);
    std::size_t f = 2;
    if (has_cons) (*ds.consistency)[i] = parse_double(fields[f++], line_no, 2);
    for (std::size_t k = 0; k < d; ++k) {
      ds.features.at(i, k) = parse_double(fields[f + k], line_no, f + k);
    }
  }

  std::ifstream split(split_path(path));
  if (!split) throw std::runtime_error("load_dataset: missing split file " + split_path(path));
  std::vector<char> in_train(n, 0);
  while (std::getline(split, line)) {
    if (line.empty()) continue;
    const auto id = static_cast<std::size_t>(parse_double(line, 0, 0));
    if (id >= n) throw std::runtime_error("load_dataset: split id " + line + " out of range");
    ds.train_ids.push_back(id);
    in_train[id] = 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_train[i]) ds.test_ids.push_back(i);
  }
  return ds;
}

Dataset load_csv(const std::string& path, const CsvLoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_csv: empty file " + path);
  auto header = split_line(line, ',');
  std::size_t label_idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == opts.label_column) label_idx = i;
  }
  if (label_idx == header.size()) {
    throw std::runtime_error("load_csv: label column '" + opts.label_column + "' not in header");
  }

  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_line(line, ',');
    if (fields.size() != header.size()) {
      throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                               " field count != header");
    }
    std::vector<double> feat;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const double v = parse_double(fields[i], line_no, i);
      if (i == label_idx) {
        if (v < 0 || v != std::floor(v)) {
          throw std::runtime_error("load_csv: non-integer label at line " +
                                   std::to_string(line_no));
        }
        labels.push_back(static_cast<std::size_t>(v));
      } else {
        feat.push_back(v);
      }
    }
    rows.push_back(std::move(feat));
  }
  if (rows.empty()) throw std::runtime_error("load_csv: no data rows in " + path);

  Dataset ds;
  ds.features = Matrix(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].begin(), rows[i].end(), ds.features.row(i));
  }
  ds.labels = labels;
  ds.class_count = *std::max_element(labels.begin(), labels.end()) + 1;
  ds.source = path;

  // seeded stratified split
  Rng rng(opts.seed);
  std::vector<std::vector<std::size_t>> by_class(ds.class_count);
  for (std::size_t i = 0; i < ds.labels.size(); ++i) by_class[ds.labels[i]].push_back(i);
  for (auto& ids : by_class) {
    for (std::size_t i = ids.size(); i > 1; --i) {
      std::swap(ids[i - 1], ids[rng.below(i)]);
    }
    const auto n_train = static_cast<std::size_t>(
        std::llround(opts.split_fraction * static_cast<double>(ids.size())));
    for (std::size_t i = 0; i < ids.size(); ++i) {
      (i < n_train ? ds.train_ids : ds.test_ids).push_back(ids[i]);
    }
  }
  std::sort(ds.train_ids.begin(), ds.train_ids.end());
  std::sort(ds.test_ids.begin(), ds.test_ids.end());

  if (opts.zscore) {
    const std::size_t d = ds.features.cols;
    std::vector<double> mean(d, 0.0), sd(d, 0.0);
    for (std::size_t id : ds.train_ids) {
      for (std::size_t k = 0; k < d; ++k) mean[k] += ds.features.at(id, k);
    }
    for (std::size_t k = 0; k < d; ++k) mean[k] /= static_cast<double>(ds.train_ids.size());
    for (std::size_t id : ds.train_ids) {
      for (std::size_t k = 0; k < d; ++k) {
        const double dv = ds.features.at(id, k) - mean[k];
        sd[k] += dv * dv;
      }
    }
    for (std::size_t k = 0; k < d; ++k) {
      sd[k] = std::sqrt(sd[k] / static_cast<double>(ds.train_ids.size()));
      if (sd[k] < 1e-12) sd[k] = 1.0;
    }
    for (std::size_t i = 0; i < ds.size(); ++i) {
      for (std::size_t k = 0; k < d; ++k) {
        ds.features.at(i, k) = (ds.features.at(i, k) - mean[k]) / sd[k];
      }
    }
  }
  return ds;
}

}  // namespace da
