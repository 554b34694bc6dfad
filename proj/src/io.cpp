#include "hypertopic/io.hpp"

#include "hypertopic/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace hypertopic {
namespace {

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& what) {
  throw Error(ErrorKind::ParseError, source + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r') ++end;
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

template <class T>
bool parse_integer(std::string_view s, T& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_real(std::string_view s, double& out) {
  // from_chars for double is unavailable in some libstdc++ builds; strtod needs a terminated copy.
  const std::string copy(s);
  char* end = nullptr;
  out = std::strtod(copy.c_str(), &end);
  return !copy.empty() && end == copy.c_str() + copy.size();
}

// Parses `key=value` and returns value, or fails.
std::string_view keyed(std::string_view field, std::string_view key, const std::string& source, std::size_t line) {
  if (field.size() <= key.size() + 1 || field.substr(0, key.size()) != key || field[key.size()] != '=')
    parse_fail(source, line, "expected " + std::string(key) + "=<value>");
  return field.substr(key.size() + 1);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::ConfigInvalid, "cannot write " + path.string());
  return out;
}

std::string real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

Corpus read_corpus(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) parse_fail(source, 1, "missing header");
  const auto head = split_fields(line);
  if (head.size() != 4 || head[0] != "#hypertopic-corpus" || head[1] != "v1")
    parse_fail(source, 1, "expected header '#hypertopic-corpus v1 p=<int> T=<int>'");
  Index p = 0, T = 0;
  if (!parse_integer(keyed(head[2], "p", source, 1), p) || p < 1) parse_fail(source, 1, "invalid p");
  if (!parse_integer(keyed(head[3], "T", source, 1), T) || T < 1) parse_fail(source, 1, "invalid T");

  std::vector<std::map<Index, std::map<Index, int>>> docs(static_cast<std::size_t>(T));
  while (std::getline(in, line)) {
    ++lineno;
    const auto f = split_fields(line);
    if (f.empty() || f[0].front() == '#') continue;
    if (f.size() != 4) parse_fail(source, lineno, "expected 4 fields t, doc, word, count");
    Index t = 0, doc = 0, word = 0;
    int count = 0;
    if (!parse_integer(f[0], t) || t < 0 || t >= T) parse_fail(source, lineno, "time index out of range");
    if (!parse_integer(f[1], doc) || doc < 0) parse_fail(source, lineno, "invalid document index");
    if (!parse_integer(f[2], word) || word < 0 || word >= p) parse_fail(source, lineno, "word index out of range");
    if (!parse_integer(f[3], count) || count < 1) parse_fail(source, lineno, "count must be a positive integer");
    if (!docs[t][doc].emplace(word, count).second) parse_fail(source, lineno, "duplicate (t, doc, word) triplet");
  }

  std::vector<std::vector<Document>> slices(static_cast<std::size_t>(T));
  for (Index t = 0; t < T; ++t) {
    const auto& slice = docs[t];
    if (slice.empty()) throw Error(ErrorKind::ParseError, source + ": time slice " + std::to_string(t) + " has no documents");
    const Index n_t = slice.rbegin()->first + 1;
    if (static_cast<Index>(slice.size()) != n_t) {
      Index missing = 0;
      while (slice.contains(missing)) ++missing;
      throw Error(ErrorKind::EmptySupport, source + ": document " + std::to_string(missing) + " of slice " +
                                               std::to_string(t) + " has no triplets");
    }
    for (const auto& [doc, words] : slice) {
      std::vector<Index> w;
      std::vector<int> c;
      for (const auto& [word, count] : words) {
        w.push_back(word);
        c.push_back(count);
      }
      slices[t].emplace_back(p, std::move(w), std::move(c));
    }
  }
  return Corpus(p, std::move(slices));
}

Corpus read_corpus(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_corpus(in, path.string());
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  out << "#hypertopic-corpus v1 p=" << corpus.vocab_size() << " T=" << corpus.num_slices() << '\n';
  for (Index t = 0; t < corpus.num_slices(); ++t) {
    const auto& slice = corpus.slice(t);
    for (std::size_t i = 0; i < slice.size(); ++i) {
      const auto words = slice[i].words();
      const auto counts = slice[i].counts();
      for (std::size_t j = 0; j < words.size(); ++j)
        out << t << '\t' << i << '\t' << words[j] << '\t' << counts[j] << '\n';
    }
  }
}

void write_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  auto out = open_out(path);
  write_corpus(out, corpus);
}

std::vector<std::string> read_vocabulary(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<std::string> vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    vocab.push_back(line);
  }
  return vocab;
}

void write_vocabulary(const std::filesystem::path& path, const std::vector<std::string>& vocab) {
  auto out = open_out(path);
  for (const auto& w : vocab) out << w << '\n';
}

std::vector<std::vector<int>> read_labels(std::istream& in, const std::vector<Index>& slice_sizes,
                                          const std::string& source) {
  std::vector<std::vector<int>> labels;
  std::vector<std::vector<bool>> seen;
  for (Index n : slice_sizes) {
    labels.emplace_back(static_cast<std::size_t>(n), 0);
    seen.emplace_back(static_cast<std::size_t>(n), false);
  }
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto f = split_fields(line);
    if (f.empty() || f[0].front() == '#') continue;
    if (f.size() != 3) parse_fail(source, lineno, "expected 3 fields t, doc, label");
    Index t = 0, doc = 0;
    int label = 0;
    if (!parse_integer(f[0], t) || t < 0 || t >= static_cast<Index>(labels.size()))
      parse_fail(source, lineno, "time index out of range");
    if (!parse_integer(f[1], doc) || doc < 0 || doc >= static_cast<Index>(labels[t].size()))
      parse_fail(source, lineno, "document index out of range");
    if (!parse_integer(f[2], label)) parse_fail(source, lineno, "label must be an integer");
    if (seen[t][doc]) parse_fail(source, lineno, "duplicate label");
    seen[t][doc] = true;
    labels[t][doc] = label;
  }
  for (std::size_t t = 0; t < seen.size(); ++t)
    for (std::size_t i = 0; i < seen[t].size(); ++i)
      if (!seen[t][i])
        throw Error(ErrorKind::ParseError,
                    source + ": missing label for document " + std::to_string(i) + " of slice " + std::to_string(t));
  return labels;
}

std::vector<std::vector<int>> read_labels(const std::filesystem::path& path, const std::vector<Index>& slice_sizes) {
  auto in = open_in(path);
  return read_labels(in, slice_sizes, path.string());
}

void write_labels(std::ostream& out, const std::vector<std::vector<int>>& labels) {
  for (std::size_t t = 0; t < labels.size(); ++t)
    for (std::size_t i = 0; i < labels[t].size(); ++i) out << t << '\t' << i << '\t' << labels[t][i] << '\n';
}

void write_labels(const std::filesystem::path& path, const std::vector<std::vector<int>>& labels) {
  auto out = open_out(path);
  write_labels(out, labels);
}

// Model container:
//   #hypertopic-model v1
//   K <int>  T <int>  p <int>          (one per line)
//   bounds <lp> <up> <la> <ua>
//   meta <key>=<value>                 (zero or more)
//   slice <t> <n_t>
//   W <rows> <cols> / P ... / A ...    each followed by its rows
//   end
ModelFile read_model(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  auto next = [&](bool required) -> std::vector<std::string_view> {
    while (std::getline(in, line)) {
      ++lineno;
      auto f = split_fields(line);
      if (!f.empty()) return f;
    }
    if (required) parse_fail(source, lineno + 1, "unexpected end of file");
    return {};
  };
  auto integer = [&](std::string_view s, const char* what) {
    Index v = 0;
    if (!parse_integer(s, v) || v < 0) parse_fail(source, lineno, std::string("invalid ") + what);
    return v;
  };

  auto f = next(true);
  if (f.size() != 2 || f[0] != "#hypertopic-model" || f[1] != "v1")
    parse_fail(source, lineno, "expected header '#hypertopic-model v1'");

  ModelFile model;
  Index T = -1, p = -1;
  bool have_bounds = false;
  while (true) {
    f = next(true);
    if (f[0] == "slice") break;
    if ((f[0] == "K" || f[0] == "T" || f[0] == "p") && f.size() == 2) {
      const Index v = integer(f[1], "shape value");
      if (f[0] == "K") model.params.K = v;
      else if (f[0] == "T") T = v;
      else p = v;
    } else if (f[0] == "bounds" && f.size() == 5) {
      double b[4];
      for (int i = 0; i < 4; ++i)
        if (!parse_real(f[i + 1], b[i])) parse_fail(source, lineno, "invalid bound");
      model.params.bounds = {b[0], b[1], b[2], b[3]};
      have_bounds = true;
    } else if (f[0] == "meta") {
      const std::string rest = line.substr(line.find("meta") + 5);
      const auto eq = rest.find('=');
      if (eq == std::string::npos || eq == 0) parse_fail(source, lineno, "expected meta <key>=<value>");
      model.meta[rest.substr(0, eq)] = rest.substr(eq + 1);
    } else {
      parse_fail(source, lineno, "unexpected line '" + std::string(f[0]) + "'");
    }
  }
  if (model.params.K < 1 || T < 1 || p < 1 || !have_bounds)
    parse_fail(source, lineno, "K, T, p and bounds must precede the first slice");

  auto read_block = [&](const char* name, Index rows) {
    const auto h = next(true);
    if (h.size() != 3 || h[0] != name) parse_fail(source, lineno, std::string("expected block ") + name);
    if (integer(h[1], "rows") != rows || integer(h[2], "cols") != model.params.K)
      parse_fail(source, lineno, std::string("block ") + name + " has the wrong shape");
    Eigen::MatrixXd m(rows, model.params.K);
    for (Index i = 0; i < rows; ++i) {
      const auto r = next(true);
      if (static_cast<Index>(r.size()) != model.params.K) parse_fail(source, lineno, "row has the wrong width");
      for (Index k = 0; k < model.params.K; ++k)
        if (!parse_real(r[k], m(i, k))) parse_fail(source, lineno, "invalid number");
    }
    return m;
  };

  for (Index t = 0; t < T; ++t) {
    if (t > 0) f = next(true);
    if (f.size() != 3 || f[0] != "slice" || integer(f[1], "slice index") != t)
      parse_fail(source, lineno, "expected slice " + std::to_string(t));
    const Index n_t = integer(f[2], "slice size");
    TimeSliceParams sp;
    sp.W = read_block("W", n_t);
    sp.P = read_block("P", p);
    sp.A = read_block("A", p);
    model.params.slices.push_back(std::move(sp));
  }
  f = next(true);
  if (f.size() != 1 || f[0] != "end") parse_fail(source, lineno, "expected 'end'");

  try {
    model.params.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::ParseError, source + ": infeasible model: " + e.what());
  }
  return model;
}

ModelFile read_model(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_model(in, path.string());
}

void write_model(std::ostream& out, const ModelFile& model) {
  const auto& m = model.params;
  out << "#hypertopic-model v1\n";
  out << "K " << m.K << "\nT " << m.num_slices() << "\np " << m.vocab_size() << '\n';
  out << "bounds " << real(m.bounds.lp) << ' ' << real(m.bounds.up) << ' ' << real(m.bounds.la) << ' '
      << real(m.bounds.ua) << '\n';
  for (const auto& [k, v] : model.meta) {
    if (k.find_first_of("= \t\n") != std::string::npos || v.find('\n') != std::string::npos)
      throw Error(ErrorKind::ConfigInvalid, "metadata key or value not representable: " + k);
    out << "meta " << k << '=' << v << '\n';
  }
  auto block = [&](const char* name, const Eigen::MatrixXd& b) {
    out << name << ' ' << b.rows() << ' ' << b.cols() << '\n';
    for (Index i = 0; i < b.rows(); ++i) {
      for (Index k = 0; k < b.cols(); ++k) out << (k ? "\t" : "") << real(b(i, k));
      out << '\n';
    }
  };
  for (Index t = 0; t < m.num_slices(); ++t) {
    out << "slice " << t << ' ' << m.slices[t].num_docs() << '\n';
    block("W", m.slices[t].W);
    block("P", m.slices[t].P);
    block("A", m.slices[t].A);
  }
  out << "end\n";
}

void write_model(const std::filesystem::path& path, const ModelFile& model) {
  auto out = open_out(path);
  write_model(out, model);
}

}  // namespace hypertopic
