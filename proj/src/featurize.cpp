#include "genolang/featurize.hpp"

#include "genolang/error.hpp"
#include "genolang/text_io.hpp"

#include <cmath>
#include <unordered_set>

namespace genolang {

KmerNorm parse_kmer_norm(std::string_view s) {
    if (s == "counts") return KmerNorm::counts;
    if (s == "frequency") return KmerNorm::frequency;
    if (s == "tfidf") return KmerNorm::tfidf;
    fail(ErrorKind::config, "unknown k-mer normalization '" + std::string(s) + "' (counts|frequency|tfidf)");
}

const char* to_string(KmerNorm n) noexcept {
    switch (n) {
    case KmerNorm::counts: return "counts";
    case KmerNorm::frequency: return "frequency";
    case KmerNorm::tfidf: return "tfidf";
    }
    return "?";
}

void KmerSpec::validate() const {
    if (k < 1 || k > 6) fail(ErrorKind::config, "k must be in 1..6 (got " + std::to_string(k) + ")");
}

std::string kmer_name(std::size_t index, int k) {
    static constexpr char bases[] = "ACGT";
    std::string s(static_cast<std::size_t>(k), 'A');
    for (int i = k - 1; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = bases[index & 3];
        index >>= 2;
    }
    return s;
}

void PhyschemTable::validate() const {
    for (const auto* p : {&charge_distribution, &hydrophobicity_index, &molecular_weight})
        for (double w : *p)
            if (!std::isfinite(w)) fail(ErrorKind::config, "physicochemical weights must be finite");
}

PhyschemTable load_physchem_table(const std::filesystem::path& path) {
    PhyschemTable t;
    const std::string text = read_text_file(path);
    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view line = trim(lines[i]);
        if (line.empty() || line.front() == '#') continue;
        const auto f = split_fields(line, '\t');
        const std::string where = path.string() + ": line " + std::to_string(i + 1);
        if (f.size() != 5) fail(ErrorKind::format, where + ": expected property and 4 weights");
        std::array<double, 4>* target = nullptr;
        const std::string_view name = trim(f[0]);
        if (name == "property") continue;
        if (name == "charge_distribution") target = &t.charge_distribution;
        else if (name == "hydrophobicity_index") target = &t.hydrophobicity_index;
        else if (name == "molecular_weight") target = &t.molecular_weight;
        else fail(ErrorKind::format, where + ": unknown property '" + std::string(name) + "'");
        for (std::size_t b = 0; b < 4; ++b)
            if (!parse_double(f[b + 1], (*target)[b]) || !std::isfinite((*target)[b]))
                fail(ErrorKind::format, where + ": bad weight '" + std::string(f[b + 1]) + "'");
    }
    return t;
}

void FeatureMatrix::validate() const {
    require(values.size() == rows * cols(), "feature matrix shape mismatch");
    std::unordered_set<std::string_view> seen;
    for (const auto& n : feature_names)
        require(seen.insert(n).second, "duplicate feature name '" + n + "'");
    for (double v : values) require(std::isfinite(v), "non-finite feature value");
}

double gc_content(std::string_view seq) {
    if (seq.empty()) fail(ErrorKind::empty_sequence, "gc_content of an empty sequence");
    std::size_t gc = 0, acgt = 0;
    for (char b : seq) {
        int i = base_index(b);
        if (i < 0) continue;
        ++acgt;
        if (i == 1 || i == 2) ++gc;
    }
    return acgt == 0 ? 0.0 : static_cast<double>(gc) / static_cast<double>(acgt);
}

std::vector<double> kmer_counts(std::string_view seq, int k, std::size_t* valid_windows) {
    if (seq.size() < static_cast<std::size_t>(k))
        fail(ErrorKind::short_sequence, "sequence of length " + std::to_string(seq.size()) + " is shorter than k=" + std::to_string(k));
    const std::size_t dim = std::size_t{1} << (2 * k);
    const std::size_t mask = dim - 1;
    std::vector<double> counts(dim, 0.0);
    std::size_t code = 0, run = 0, valid = 0;
    // Rolling 2-bit code; `run` counts consecutive ACGT bases ending here.
    for (char b : seq) {
        int i = base_index(b);
        if (i < 0) {
            run = 0;
            code = 0;
            continue;
        }
        code = ((code << 2) | static_cast<std::size_t>(i)) & mask;
        if (++run >= static_cast<std::size_t>(k)) {
            counts[code] += 1.0;
            ++valid;
        }
    }
    if (valid_windows) *valid_windows = valid;
    return counts;
}

std::vector<double> kmer_frequencies(std::string_view seq, const KmerSpec& spec) {
    spec.validate();
    std::size_t valid = 0;
    auto v = kmer_counts(seq, spec.k, &valid);
    if (spec.normalization != KmerNorm::counts && valid > 0) {
        const double inv = 1.0 / static_cast<double>(valid);
        for (double& x : v) x *= inv;
    }
    return v;
}

std::vector<double> tfidf_fit(const FeatureMatrix& m, std::span<const std::size_t> columns) {
    std::vector<double> idf;
    idf.reserve(columns.size());
    const double rows = static_cast<double>(m.rows);
    for (std::size_t c : columns) {
        require(c < m.cols(), "tfidf column out of range");
        std::size_t df = 0;
        for (std::size_t r = 0; r < m.rows; ++r)
            if (m.at(r, c) > 0.0) ++df;
        idf.push_back(std::log((1.0 + rows) / (1.0 + static_cast<double>(df))));
    }
    return idf;
}

void tfidf_apply(FeatureMatrix& m, std::span<const std::size_t> columns, std::span<const double> idf) {
    require(columns.size() == idf.size(), "idf length does not match tfidf columns");
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t j = 0; j < columns.size(); ++j) m.at(r, columns[j]) *= idf[j];
}

std::vector<double> tfidf_weight(FeatureMatrix& m, std::span<const std::size_t> columns) {
    auto idf = tfidf_fit(m, columns);
    tfidf_apply(m, columns, idf);
    return idf;
}

PhyschemValues physchem_features(std::string_view seq, const PhyschemTable& table) {
    std::array<std::size_t, 4> counts{};
    std::size_t total = 0;
    for (char b : seq) {
        int i = base_index(b);
        if (i >= 0) {
            ++counts[static_cast<std::size_t>(i)];
            ++total;
        }
    }
    if (total == 0) fail(ErrorKind::degenerate_sequence, "sequence has no A/C/G/T bases");
    auto weighted = [&](const std::array<double, 4>& w) {
        double s = 0;
        for (std::size_t b = 0; b < 4; ++b) s += w[b] * static_cast<double>(counts[b]);
        return s / static_cast<double>(total);
    };
    PhyschemValues v;
    v.length = static_cast<double>(seq.size());
    v.charge_distribution = weighted(table.charge_distribution);
    v.hydrophobicity_index = weighted(table.hydrophobicity_index);
    v.molecular_weight = weighted(table.molecular_weight);
    return v;
}

OneHotTensor one_hot_encode(std::string_view seq, std::size_t max_len) {
    require(max_len >= 1, "one_hot_encode: max_len must be >= 1");
    OneHotTensor t;
    t.max_len = max_len;
    t.data.assign(4 * max_len, 0);
    const std::size_t n = std::min(seq.size(), max_len);
    for (std::size_t p = 0; p < n; ++p) {
        int b = base_index(seq[p]);
        if (b >= 0) t.data[static_cast<std::size_t>(b) * max_len + p] = 1;
    }
    return t;
}

std::vector<std::string> handcrafted_feature_names(std::span<const KmerSpec> specs) {
    std::vector<std::string> names{"length", "gc_content", "charge_distribution", "hydrophobicity_index", "molecular_weight"};
    for (const auto& s : specs) {
        s.validate();
        for (std::size_t i = 0; i < s.dimension(); ++i) names.push_back(kmer_name(i, s.k));
    }
    return names;
}

std::vector<std::size_t> tfidf_columns(std::span<const KmerSpec> specs) {
    std::vector<std::size_t> cols;
    std::size_t offset = scalar_feature_count;
    for (const auto& s : specs) {
        if (s.normalization == KmerNorm::tfidf)
            for (std::size_t i = 0; i < s.dimension(); ++i) cols.push_back(offset + i);
        offset += s.dimension();
    }
    return cols;
}

void featurize_row(std::string_view seq, std::span<const KmerSpec> specs, const PhyschemTable& table, std::span<double> out) {
    const PhyschemValues pc = physchem_features(seq, table);
    out[0] = pc.length;
    out[1] = gc_content(seq);
    out[2] = pc.charge_distribution;
    out[3] = pc.hydrophobicity_index;
    out[4] = pc.molecular_weight;
    std::size_t offset = scalar_feature_count;
    for (const auto& s : specs) {
        const auto v = kmer_frequencies(seq, s);
        std::copy(v.begin(), v.end(), out.begin() + static_cast<std::ptrdiff_t>(offset));
        offset += v.size();
    }
}

FeatureMatrix featurize_records_unweighted(std::span<const SequenceRecord> records, std::span<const KmerSpec> specs, const PhyschemTable& table) {
    require(!specs.empty(), "featurize: at least one k-mer spec is required");
    table.validate();
    FeatureMatrix m;
    m.feature_names = handcrafted_feature_names(specs);
    m.rows = records.size();
    m.values.assign(m.rows * m.cols(), 0.0);

    const auto n = static_cast<std::ptrdiff_t>(records.size());
    std::vector<std::string> errors(records.size());
    std::vector<ErrorKind> kinds(records.size(), ErrorKind::contract);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto r = static_cast<std::size_t>(i);
        try {
            featurize_row(records[r].sequence, specs, table, m.row(r));
        } catch (const Error& e) {
            errors[r] = e.what();
            kinds[r] = e.kind();
        }
    }
    for (std::size_t r = 0; r < records.size(); ++r)
        if (!errors[r].empty()) throw Error(kinds[r], "record '" + records[r].id + "': " + errors[r]);
    return m;
}

FeatureMatrix featurize_records(std::span<const SequenceRecord> records, std::span<const KmerSpec> specs, const PhyschemTable& table) {
    FeatureMatrix m = featurize_records_unweighted(records, specs, table);
    const auto cols = tfidf_columns(specs);
    if (!cols.empty()) tfidf_weight(m, cols);
    return m;
}

FeatureMatrix featurize_dataset(const LabeledDataset& d, std::span<const KmerSpec> specs, const PhyschemTable& table) {
    return featurize_records(d.records, specs, table);
}

FeatureMatrix featurize_dataset(const LabeledDataset& d, const KmerSpec& spec, const PhyschemTable& table) {
    return featurize_records(d.records, std::span<const KmerSpec>(&spec, 1), table);
}

std::string write_feature_csv(const FeatureMatrix& m, std::span<const SequenceRecord> records) {
    require(records.size() == m.rows, "feature CSV: record count does not match matrix rows");
    std::string out = "id";
    for (const auto& n : m.feature_names) {
        out += ',';
        out += n;
    }
    out += '\n';
    for (std::size_t r = 0; r < m.rows; ++r) {
        out += records[r].id;
        for (double v : m.row(r)) {
            out += ',';
            out += format_g17(v);
        }
        out += '\n';
    }
    return out;
}

} // namespace genolang
