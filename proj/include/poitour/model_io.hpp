#pragma once

// word2vec text format: `<vocab_size> <dim>` then `token v1 ... vdim` per line.
// Subword models add a sidecar `<model>.ngrams`:
// `<bucket_count> <dim> <ngram_min> <ngram_max>` then one bucket vector per line.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "poitour/error.hpp"
#include "poitour/model.hpp"
#include "poitour/text.hpp"

namespace poitour {

inline std::filesystem::path ngram_sidecar_path(const std::filesystem::path& model_path) {
  auto p = model_path;
  p += ".ngrams";
  return p;
}

namespace detail {

inline void write_row(std::ostream& out, std::span<const float> row) {
  char buf[32];
  for (float x : row) {
    std::snprintf(buf, sizeof buf, " %.9g", static_cast<double>(x));
    out << buf;
  }
  out << '\n';
}

inline void read_row(std::string_view line, std::size_t skip, std::span<float> row, std::size_t line_no) {
  std::size_t k = 0;
  std::size_t seen = 0;
  for (auto tok : text::split(text::trim(line), ' ')) {
    if (tok.empty()) continue;
    if (seen++ < skip) continue;
    if (k == row.size()) throw ParseError("too many values", line_no);
    const auto v = text::parse_double(tok);
    if (!v) throw ParseError("not a number: " + std::string(tok), line_no);
    row[k++] = static_cast<float>(*v);
  }
  if (k != row.size()) {
    throw ParseError("expected " + std::to_string(row.size()) + " values, got " + std::to_string(k), line_no);
  }
}

inline std::pair<std::int64_t, std::int64_t> read_pair_header(std::string_view line) {
  const auto f = text::split(text::trim(line), ' ');
  if (f.size() != 2) throw ParseError("header must be '<count> <dim>'", 1, "header");
  const auto a = text::parse_int(f[0]);
  const auto b = text::parse_int(f[1]);
  if (!a || !b || *a <= 0 || *b <= 0) throw ParseError("header must hold two positive integers", 1, "header");
  return {*a, *b};
}

}  // namespace detail

inline void write_vectors(std::ostream& out, const EmbeddingModel& model) {
  const auto& vocab = model.vocabulary();
  out << vocab.size() << ' ' << model.dim() << '\n';
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out << vocab.token(i);
    detail::write_row(out, model.input_row(i));
  }
}

inline void write_ngrams(std::ostream& out, const EmbeddingModel& model) {
  const auto& hp = model.hyperparams();
  out << hp.bucket_count << ' ' << hp.dim << ' ' << hp.ngram_min << ' ' << hp.ngram_max << '\n';
  for (std::uint64_t b = 0; b < hp.bucket_count; ++b) detail::write_row(out, model.ngram_row(b));
}

/// Reads vectors and, when `ngrams` is given, the subword sidecar.
inline EmbeddingModel read_model(std::istream& vectors, std::istream* ngrams = nullptr) {
  std::string line;
  if (!std::getline(vectors, line)) throw ParseError("empty model file", 1);
  const auto [count, dim] = detail::read_pair_header(text::chomp(line, true));

  std::vector<std::pair<std::string, std::int64_t>> entries;
  std::vector<std::vector<float>> rows;
  std::size_t line_no = 1;
  while (std::getline(vectors, line)) {
    ++line_no;
    const auto l = text::trim(text::chomp(line, false));
    if (l.empty()) continue;
    const auto sp = l.find(' ');
    if (sp == std::string_view::npos) throw ParseError("missing vector values", line_no);
    if (static_cast<std::int64_t>(entries.size()) == count) {
      throw ParseError("more vector lines than the header's " + std::to_string(count), line_no);
    }
    entries.emplace_back(std::string(l.substr(0, sp)), 1);
    rows.emplace_back(static_cast<std::size_t>(dim));
    detail::read_row(l, 1, rows.back(), line_no);
  }
  if (static_cast<std::int64_t>(entries.size()) != count) {
    throw ParseError("header declares " + std::to_string(count) + " tokens but file has " +
                     std::to_string(entries.size()));
  }

  HyperParams hp;
  hp.dim = static_cast<int>(dim);
  hp.model_kind = ModelKind::skipgram;
  std::string ngram_header;
  if (ngrams) {
    if (!std::getline(*ngrams, ngram_header)) throw ParseError("empty n-gram file", 1);
    const auto f = text::split(text::trim(text::chomp(ngram_header, true)), ' ');
    if (f.size() != 4) throw ParseError("n-gram header must be '<buckets> <dim> <min> <max>'", 1, "header");
    const auto buckets = text::parse_int(f[0]);
    const auto ndim = text::parse_int(f[1]);
    const auto nmin = text::parse_int(f[2]);
    const auto nmax = text::parse_int(f[3]);
    if (!buckets || !ndim || !nmin || !nmax || *buckets <= 0) throw ParseError("bad n-gram header", 1, "header");
    if (*ndim != dim) throw ParseError("n-gram dim differs from vector dim", 1, "header");
    hp.model_kind = ModelKind::fasttext_skipgram;
    hp.bucket_count = static_cast<std::uint64_t>(*buckets);
    hp.ngram_min = static_cast<int>(*nmin);
    hp.ngram_max = static_cast<int>(*nmax);
  }

  EmbeddingModel model(Vocabulary::from_ordered(std::move(entries)), hp);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].begin(), rows[i].end(), model.input_row(i).begin());
  }
  if (ngrams) {
    std::uint64_t b = 0;
    std::size_t nl = 1;
    while (std::getline(*ngrams, line)) {
      ++nl;
      const auto l = text::trim(text::chomp(line, false));
      if (l.empty()) continue;
      if (b == hp.bucket_count) throw ParseError("more bucket lines than declared", nl);
      detail::read_row(l, 0, model.ngram_row(b), nl);
      ++b;
    }
    if (b != hp.bucket_count) {
      throw ParseError("header declares " + std::to_string(hp.bucket_count) + " buckets but file has " +
                       std::to_string(b));
    }
  }
  return model;
}

inline void save_model(const EmbeddingModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  write_vectors(out, model);
  if (!out) throw Error("write failed: " + path.string());
  if (model.has_subwords()) {
    std::ofstream side(ngram_sidecar_path(path), std::ios::binary);
    if (!side) throw Error("cannot open for writing: " + ngram_sidecar_path(path).string());
    write_ngrams(side, model);
  }
}

/// Loads a model; a `.ngrams` sidecar next to it marks a subword model.
inline EmbeddingModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open model file: " + path.string());
  const auto side_path = ngram_sidecar_path(path);
  if (std::filesystem::exists(side_path)) {
    std::ifstream side(side_path, std::ios::binary);
    if (!side) throw ParseError("cannot open n-gram file: " + side_path.string());
    return read_model(in, &side);
  }
  return read_model(in);
}

}  // namespace poitour
