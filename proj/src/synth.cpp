#include "genolang/synth.hpp"

#include "genolang/error.hpp"
#include "genolang/featurize.hpp"
#include "genolang/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace genolang {

SynthTask parse_synth_task(std::string_view s) {
    if (s == "composition_motif") return SynthTask::composition_motif;
    if (s == "positional_motif") return SynthTask::positional_motif;
    fail(ErrorKind::config, "unknown synth task '" + std::string(s) + "' (composition_motif|positional_motif)");
}

const char* to_string(SynthTask t) noexcept {
    return t == SynthTask::composition_motif ? "composition_motif" : "positional_motif";
}

namespace {

bool is_acgt(const std::string& s) {
    for (char c : s)
        if (base_index(c) < 0) return false;
    return !s.empty();
}

} // namespace

void SynthSpec::validate() const {
    if (n_records < 1) fail(ErrorKind::spec, "n_records must be >= 1");
    if (seq_len < 1) fail(ErrorKind::spec, "seq_len must be >= 1");
    if (!(positive_fraction > 0.0 && positive_fraction < 1.0)) fail(ErrorKind::spec, "positive_fraction must lie in (0, 1)");
    if (!(effect_strength > 0.0 && effect_strength <= 1.0)) fail(ErrorKind::spec, "effect_strength must lie in (0, 1]");
    if (task == SynthTask::composition_motif) {
        if (!is_acgt(planted_kmer)) fail(ErrorKind::spec, "planted_kmer must be a non-empty ACGT string");
        if (planted_kmer.size() > seq_len)
            fail(ErrorKind::spec, "planted_kmer (" + std::to_string(planted_kmer.size()) + " bases) is longer than seq_len " + std::to_string(seq_len));
    } else {
        if (motif.size() != 12 || !is_acgt(motif)) fail(ErrorKind::spec, "motif must be 12 ACGT bases");
        if (motif.find_first_not_of(motif[0]) == std::string::npos)
            fail(ErrorKind::spec, "motif must contain at least two distinct bases so that it can be permuted");
        if (motif.size() > seq_len) fail(ErrorKind::spec, "motif is longer than seq_len");
        if (motif_offset >= 0 && static_cast<std::size_t>(motif_offset) + motif.size() > seq_len)
            fail(ErrorKind::spec, "motif_offset places the motif past the end of the sequence");
    }
}

std::size_t SynthSpec::resolved_offset() const {
    if (motif_offset >= 0) return static_cast<std::size_t>(motif_offset);
    return (seq_len - motif.size()) / 2;
}

std::size_t SynthSpec::positive_count() const {
    return static_cast<std::size_t>(std::llround(static_cast<double>(n_records) * positive_fraction));
}

SynthDataset generate(const SynthSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n_records;
    const std::size_t n_pos = spec.positive_count();
    if (n_pos == 0 || n_pos == n) fail(ErrorKind::spec, "spec yields a single class; adjust n_records or positive_fraction");

    std::vector<Label> labels(n, Label::not_related);
    for (std::size_t i = 0; i < n_pos; ++i) labels[i] = Label::related;
    Rng label_rng(mix_seed(spec.seed, 0));
    label_rng.shuffle(labels);

    static constexpr char bases[] = "ACGT";
    std::vector<SequenceRecord> records(n);
    std::vector<GroundTruth> truth(n);
    const int width = static_cast<int>(std::to_string(n).size());

    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        Rng rng(mix_seed(spec.seed, i + 1));
        std::string seq(spec.seq_len, 'A');
        for (char& c : seq) c = bases[rng.below(4)];
        const bool positive = labels[i] == Label::related;
        GroundTruth gt;

        if (spec.task == SynthTask::composition_motif) {
            if (positive) {
                const std::size_t k = spec.planted_kmer.size();
                const std::size_t slots = spec.seq_len / k;
                auto copies = static_cast<std::size_t>(std::ceil(spec.effect_strength * static_cast<double>(slots) / 8.0));
                copies = std::clamp<std::size_t>(copies, 1, slots);
                std::vector<std::size_t> slot_ids(slots);
                for (std::size_t s = 0; s < slots; ++s) slot_ids[s] = s;
                std::size_t first = spec.seq_len;
                for (std::size_t c = 0; c < copies; ++c) {
                    const std::size_t j = c + static_cast<std::size_t>(rng.below(slots - c));
                    std::swap(slot_ids[c], slot_ids[j]);
                    const std::size_t pos = slot_ids[c] * k;
                    seq.replace(pos, k, spec.planted_kmer);
                    first = std::min(first, pos);
                }
                gt.planted = true;
                gt.offset = static_cast<long long>(first);
            }
        } else {
            const std::size_t offset = spec.resolved_offset();
            std::string block = spec.motif;
            if (positive) {
                gt.planted = true;
                gt.offset = static_cast<long long>(offset);
            } else {
                do {
                    rng.shuffle(block);
                } while (block == spec.motif);
            }
            seq.replace(offset, block.size(), block);
        }

        char id[32];
        std::snprintf(id, sizeof id, "syn%0*zu", width, i + 1);
        records[i] = {id, "", std::move(seq)};
        gt.id = id;
        truth[i] = std::move(gt);
    }

    SynthDataset out;
    out.data.records = std::move(records);
    out.data.labels = std::move(labels);
    out.truth = std::move(truth);
    return out;
}

std::string ground_truth_csv(const std::vector<GroundTruth>& truth) {
    std::string out = "id,planted,offset\n";
    for (const auto& t : truth) out += t.id + ',' + (t.planted ? "1," : "0,") + std::to_string(t.offset) + '\n';
    return out;
}

} // namespace genolang
