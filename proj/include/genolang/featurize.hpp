#pragma once

#include "genolang/seqio.hpp"

#include <array>
#include <cstdint>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace genolang {

enum class KmerNorm { counts, frequency, tfidf };

KmerNorm parse_kmer_norm(std::string_view s);
const char* to_string(KmerNorm n) noexcept;

struct KmerSpec {
    int k = 3;
    KmerNorm normalization = KmerNorm::frequency;

    std::size_t dimension() const noexcept { return std::size_t{1} << (2 * k); }
    void validate() const;  // 1 <= k <= 6
    friend bool operator==(const KmerSpec&, const KmerSpec&) = default;
};

// Base index in the fixed A,C,G,T order; -1 for anything else.
constexpr int base_index(char b) noexcept {
    switch (b) {
    case 'A': return 0;
    case 'C': return 1;
    case 'G': return 2;
    case 'T': return 3;
    default: return -1;
    }
}

std::string kmer_name(std::size_t index, int k);

// Per-base weights, indexed by base_index.
struct PhyschemTable {
    std::array<double, 4> charge_distribution{-1.0, -1.0, -1.0, -1.0};
    std::array<double, 4> hydrophobicity_index{0.62, 0.29, 0.48, 0.73};
    std::array<double, 4> molecular_weight{331.2, 307.2, 347.2, 322.2};

    void validate() const;
    friend bool operator==(const PhyschemTable&, const PhyschemTable&) = default;
};

// TSV rows `property<TAB>A<TAB>C<TAB>G<TAB>T`; unspecified properties keep defaults.
PhyschemTable load_physchem_table(const std::filesystem::path& path);

struct PhyschemValues {
    double length = 0;
    double charge_distribution = 0;
    double hydrophobicity_index = 0;
    double molecular_weight = 0;
};

// Dense row-major matrix with named columns.
struct FeatureMatrix {
    std::vector<std::string> feature_names;
    std::size_t rows = 0;
    std::vector<double> values;

    std::size_t cols() const noexcept { return feature_names.size(); }
    double& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
    std::span<const double> row(std::size_t r) const { return {values.data() + r * cols(), cols()}; }
    std::span<double> row(std::size_t r) { return {values.data() + r * cols(), cols()}; }

    void validate() const;  // unique names, shape, all finite
};

// 4 x max_len indicator matrix, channel-major (A,C,G,T).
struct OneHotTensor {
    static constexpr std::size_t channels = 4;
    std::size_t max_len = 0;
    std::vector<std::uint8_t> data;

    double at(std::size_t channel, std::size_t pos) const { return data[channel * max_len + pos]; }
};

double gc_content(std::string_view seq);

// Raw window counts (windows containing N skipped) and the number of valid windows.
std::vector<double> kmer_counts(std::string_view seq, int k, std::size_t* valid_windows = nullptr);
std::vector<double> kmer_frequencies(std::string_view seq, const KmerSpec& spec);

// Add-one smoothed idf per column: ln((1+R)/(1+df)).
std::vector<double> tfidf_fit(const FeatureMatrix& m, std::span<const std::size_t> columns);
void tfidf_apply(FeatureMatrix& m, std::span<const std::size_t> columns, std::span<const double> idf);
// Reweights `columns` in place and returns the fitted idf vector.
std::vector<double> tfidf_weight(FeatureMatrix& m, std::span<const std::size_t> columns);

PhyschemValues physchem_features(std::string_view seq, const PhyschemTable& table);

OneHotTensor one_hot_encode(std::string_view seq, std::size_t max_len);

// Names of the handcrafted columns for a set of k-mer specs.
std::vector<std::string> handcrafted_feature_names(std::span<const KmerSpec> specs);
inline constexpr std::size_t scalar_feature_count = 5;

// Fills one row (without tfidf weighting; tfidf specs fill term frequencies).
void featurize_row(std::string_view seq, std::span<const KmerSpec> specs, const PhyschemTable& table, std::span<double> out);

// Column indices of k-mer columns belonging to tfidf specs.
std::vector<std::size_t> tfidf_columns(std::span<const KmerSpec> specs);

// Same layout, with tfidf columns left as term frequencies.
FeatureMatrix featurize_records_unweighted(std::span<const SequenceRecord> records, std::span<const KmerSpec> specs, const PhyschemTable& table);
// Layout: length, gc_content, charge_distribution, hydrophobicity_index,
// molecular_weight, then 4^k k-mer columns per spec. Rows are computed in
// parallel; output is identical to the serial reference.
FeatureMatrix featurize_records(std::span<const SequenceRecord> records, std::span<const KmerSpec> specs, const PhyschemTable& table);
FeatureMatrix featurize_dataset(const LabeledDataset& d, std::span<const KmerSpec> specs, const PhyschemTable& table);
FeatureMatrix featurize_dataset(const LabeledDataset& d, const KmerSpec& spec, const PhyschemTable& table);

// CSV: `id,<feature names...>` with 17 significant digits.
std::string write_feature_csv(const FeatureMatrix& m, std::span<const SequenceRecord> records);

} // namespace genolang
