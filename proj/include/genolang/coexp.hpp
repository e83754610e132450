#pragma once

#include "genolang/hybrid.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace genolang {

struct CoexpNetwork {
    std::map<std::string, std::string> nodes;                  // gene id -> annotation
    std::map<std::pair<std::string, std::string>, double> edges;  // key ordered (a < b)

    void add_node(const std::string& id, const std::string& annotation = {});
    // Returns false when the edge already existed (first weight kept).
    bool add_edge(const std::string& a, const std::string& b, double weight = 1.0);
    std::vector<std::string> neighbors(const std::string& id) const;
    void validate() const;

    friend bool operator==(const CoexpNetwork&, const CoexpNetwork&) = default;
};

struct LoadNetworkOptions {
    // Reject edges that mention genes absent from the annotation file.
    bool strict_nodes = false;
};

CoexpNetwork parse_network(std::string_view edges_tsv, std::string_view annotations_tsv, const LoadNetworkOptions& opt = {},
                           const std::string& edges_source = "edges", const std::string& annotations_source = "annotations");
CoexpNetwork load_network(const std::filesystem::path& edges_path, const std::filesystem::path& annotations_path,
                          const LoadNetworkOptions& opt = {});
std::string write_edges_tsv(const CoexpNetwork& n);
std::string write_annotations_tsv(const CoexpNetwork& n);

enum class Timepoint { h3, h9, h24 };
const char* to_string(Timepoint t) noexcept;

struct DegRow {
    std::string gene;
    Timepoint timepoint = Timepoint::h3;
    double log2fc = 0.0;
    bool significant = false;
};

struct DegTable {
    std::vector<DegRow> rows;
    void validate() const;  // (gene, timepoint) unique
};

DegTable parse_deg_table(std::string_view tsv, const std::string& source = "deg");
DegTable load_deg_table(const std::filesystem::path& path);

// Ids with probability strictly above threshold, by descending probability (ties by id).
std::vector<std::string> select_seeds(std::span<const PredictionRow> predictions, double threshold = 0.7);

struct Neighborhood {
    std::set<std::string> genes;
    std::vector<std::string> missing_seeds;  // seeds absent from the network
};

Neighborhood neighborhood(const CoexpNetwork& n, std::span<const std::string> seeds, int hops = 1);

struct KeywordHit {
    std::string gene;
    std::string keyword;
    friend bool operator==(const KeywordHit&, const KeywordHit&) = default;
};

const std::vector<std::string>& default_keywords();

// Case-insensitive substring match of every keyword against every gene's annotation.
std::vector<KeywordHit> keyword_scan(const CoexpNetwork& n, const std::set<std::string>& genes, std::span<const std::string> keywords);

struct DegOverlap {
    std::vector<std::string> genes;  // sorted
    std::vector<DegRow> rows;        // all rows of overlapping genes
    std::size_t count() const noexcept { return genes.size(); }
};

DegOverlap deg_overlap(const std::set<std::string>& genes, const DegTable& deg, bool significant_only = true);

struct TriageReport {
    std::vector<std::string> seeds;
    std::vector<std::string> missing_seeds;
    std::vector<std::string> neighborhood;
    std::vector<KeywordHit> keyword_hits;
    DegOverlap deg;
    int hops = 1;

    std::size_t keyword_gene_count() const;
};

struct TriageOptions {
    double threshold = 0.7;
    int hops = 1;
    std::vector<std::string> keywords = default_keywords();
    bool significant_only = true;
};

TriageReport triage(const CoexpNetwork& n, std::span<const PredictionRow> predictions, const DegTable& deg, const TriageOptions& opt);

std::string triage_text(const TriageReport& r, const CoexpNetwork& n);
// `gene,seed,annotation_hits,deg_timepoints,deg_log2fc`; list cells joined by ';'.
std::string triage_csv(const TriageReport& r);

} // namespace genolang
