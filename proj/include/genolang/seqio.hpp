#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace genolang {

struct SequenceRecord {
    std::string id;
    std::string description;
    std::string sequence;   // uppercase over {A,C,G,T,N}

    friend bool operator==(const SequenceRecord&, const SequenceRecord&) = default;
};

enum class Label : std::uint8_t { not_related = 0, related = 1 };

inline int to_int(Label l) noexcept { return static_cast<int>(l); }

struct LabeledDataset {
    std::vector<SequenceRecord> records;
    std::vector<Label> labels;

    std::size_t size() const noexcept { return records.size(); }
    std::size_t count(Label l) const noexcept;
    void push_back(SequenceRecord record, Label label);
    // Throws duplicate_id / contract errors when the invariants do not hold.
    void validate() const;
};

struct SplitSpec {
    double train_fraction = 0.8;
    bool stratified = true;
    std::uint64_t seed = 42;
    // Keep records sharing a gene key (id up to the first '-' or '.') on
    // the same side of the split.
    bool group_by_gene = false;

    void validate() const;
};

struct DatasetSplit {
    LabeledDataset train;
    LabeledDataset test;
};

// Uppercase, strip whitespace and digits, U->T, anything else outside ACGT -> N.
std::string clean_sequence(std::string_view raw);

std::vector<SequenceRecord> parse_fasta(std::string_view text);
std::vector<SequenceRecord> read_fasta(const std::filesystem::path& path);
std::string write_fasta(const std::vector<SequenceRecord>& records, std::size_t line_width = 60);

LabeledDataset parse_labeled_csv(std::string_view text, const std::string& source = "<memory>");
LabeledDataset load_labeled_csv(const std::filesystem::path& path);
std::string write_labeled_csv(const LabeledDataset& d);

// Records for prediction: FASTA (by leading '>') or CSV with id,sequence columns.
std::vector<SequenceRecord> load_records(const std::filesystem::path& path);

std::string gene_key(std::string_view id);

DatasetSplit split_dataset(const LabeledDataset& d, const SplitSpec& s);

} // namespace genolang
