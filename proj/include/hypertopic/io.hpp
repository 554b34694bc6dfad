#pragma once

#include "hypertopic/document.hpp"
#include "hypertopic/factor_model.hpp"

#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace hypertopic {

inline constexpr const char* kVersion = "0.1.0";

/// Triplet TSV: header `#hypertopic-corpus v1 p=<int> T=<int>`, then
/// `t<TAB>doc<TAB>word<TAB>count` lines with 0-based indices. Later lines
/// starting with '#' and blank lines are skipped. Parse failures throw
/// ParseError with `<source>:<line>:` prefixed.
Corpus read_corpus(std::istream& in, const std::string& source = "<corpus>");
Corpus read_corpus(const std::filesystem::path& path);
/// Canonical form: triplets ordered by (t, doc, word).
void write_corpus(std::ostream& out, const Corpus& corpus);
void write_corpus(const std::filesystem::path& path, const Corpus& corpus);

/// One token per line.
std::vector<std::string> read_vocabulary(const std::filesystem::path& path);
void write_vocabulary(const std::filesystem::path& path, const std::vector<std::string>& vocab);

/// `t<TAB>doc<TAB>label`; every (t, doc) in the shape must be covered once.
std::vector<std::vector<int>> read_labels(std::istream& in, const std::vector<Index>& slice_sizes,
                                          const std::string& source = "<labels>");
std::vector<std::vector<int>> read_labels(const std::filesystem::path& path, const std::vector<Index>& slice_sizes);
void write_labels(std::ostream& out, const std::vector<std::vector<int>>& labels);
void write_labels(const std::filesystem::path& path, const std::vector<std::vector<int>>& labels);

using Metadata = std::map<std::string, std::string>;

struct ModelFile {
  ModelParams params;
  Metadata meta;
};

/// Versioned text container with dense row-major blocks and shape headers.
/// Feasibility is re-validated on load.
ModelFile read_model(std::istream& in, const std::string& source = "<model>");
ModelFile read_model(const std::filesystem::path& path);
void write_model(std::ostream& out, const ModelFile& model);
void write_model(const std::filesystem::path& path, const ModelFile& model);

}  // namespace hypertopic
