#pragma once

#include "genolang/seqio.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace genolang {

enum class SynthTask { composition_motif, positional_motif };

SynthTask parse_synth_task(std::string_view s);
const char* to_string(SynthTask t) noexcept;

struct SynthSpec {
    SynthTask task = SynthTask::composition_motif;
    std::size_t n_records = 2000;
    std::size_t seq_len = 500;
    double positive_fraction = 1.0 / 11.0;
    std::string planted_kmer = "TTT";
    // composition_motif: a positive receives ceil(effect_strength * slots / 8)
    // copies of planted_kmer in distinct non-overlapping slots (slots = seq_len / |kmer|).
    double effect_strength = 1.0;
    std::string motif = "TGCATTACGGAC";   // positional_motif, 12 bases
    long long motif_offset = -1;          // -1 centres the motif
    std::uint64_t seed = 7;

    void validate() const;
    std::size_t resolved_offset() const;
    std::size_t positive_count() const;
};

struct GroundTruth {
    std::string id;
    bool planted = false;
    long long offset = -1;   // first planted position, -1 when nothing was planted
};

struct SynthDataset {
    LabeledDataset data;
    std::vector<GroundTruth> truth;
};

SynthDataset generate(const SynthSpec& spec);

// `id,planted,offset`
std::string ground_truth_csv(const std::vector<GroundTruth>& truth);

} // namespace genolang
