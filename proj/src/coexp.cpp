#include "genolang/coexp.hpp"

#include "genolang/error.hpp"
#include "genolang/text_io.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <unordered_set>

namespace genolang {

void CoexpNetwork::add_node(const std::string& id, const std::string& annotation) {
    auto [it, inserted] = nodes.try_emplace(id, annotation);
    if (!inserted && it->second.empty()) it->second = annotation;
}

bool CoexpNetwork::add_edge(const std::string& a, const std::string& b, double weight) {
    require(a != b, "self-loop on '" + a + "'");
    auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    return edges.try_emplace(std::move(key), weight).second;
}

std::vector<std::string> CoexpNetwork::neighbors(const std::string& id) const {
    std::vector<std::string> out;
    for (const auto& [key, w] : edges) {
        if (key.first == id) out.push_back(key.second);
        else if (key.second == id) out.push_back(key.first);
    }
    return out;
}

void CoexpNetwork::validate() const {
    for (const auto& [key, w] : edges) {
        require(key.first < key.second, "edge key not ordered or self-loop");
        require(nodes.count(key.first) && nodes.count(key.second), "edge endpoint missing from nodes");
    }
}

namespace {

bool is_header(std::string_view first_field, std::string_view expected) { return trim(first_field) == expected; }

} // namespace

CoexpNetwork parse_network(std::string_view edges_tsv, std::string_view annotations_tsv, const LoadNetworkOptions& opt,
                           const std::string& edges_source, const std::string& annotations_source) {
    CoexpNetwork n;
    const auto alines = split_lines(annotations_tsv);
    for (std::size_t i = 0; i < alines.size(); ++i) {
        std::string_view line = alines[i];
        if (trim(line).empty() || line.front() == '#') continue;
        const auto f = split_fields(line, '\t');
        if (i == 0 && is_header(f[0], "gene_id")) continue;
        const std::string where = annotations_source + ": line " + std::to_string(i + 1);
        if (f.size() > 2) fail(ErrorKind::format, where + ": expected gene_id<TAB>annotation");
        const std::string id(trim(f[0]));
        if (id.empty()) fail(ErrorKind::format, where + ": empty gene id");
        if (n.nodes.count(id)) fail(ErrorKind::format, where + ": duplicate annotation for '" + id + "'");
        n.nodes[id] = f.size() == 2 ? std::string(trim(f[1])) : std::string();
    }

    const auto elines = split_lines(edges_tsv);
    for (std::size_t i = 0; i < elines.size(); ++i) {
        std::string_view line = elines[i];
        if (trim(line).empty() || line.front() == '#') continue;
        const auto f = split_fields(line, '\t');
        if (i == 0 && is_header(f[0], "gene_a")) continue;
        const std::string where = edges_source + ": line " + std::to_string(i + 1);
        if (f.size() < 2 || f.size() > 3) fail(ErrorKind::format, where + ": expected gene_a<TAB>gene_b[<TAB>weight]");
        const std::string a(trim(f[0])), b(trim(f[1]));
        if (a.empty() || b.empty()) fail(ErrorKind::format, where + ": empty gene id");
        if (a == b) fail(ErrorKind::format, where + ": self-loop on '" + a + "'");
        double w = 1.0;
        if (f.size() == 3 && !trim(f[2]).empty() && !parse_double(f[2], w))
            fail(ErrorKind::format, where + ": bad weight '" + std::string(f[2]) + "'");
        for (const auto& id : {a, b}) {
            if (!n.nodes.count(id)) {
                if (opt.strict_nodes) fail(ErrorKind::format, where + ": edge references unknown gene '" + id + "'");
                n.nodes[id] = "";
            }
        }
        n.add_edge(a, b, w);
    }
    return n;
}

CoexpNetwork load_network(const std::filesystem::path& edges_path, const std::filesystem::path& annotations_path,
                          const LoadNetworkOptions& opt) {
    return parse_network(read_text_file(edges_path), read_text_file(annotations_path), opt, edges_path.string(), annotations_path.string());
}

std::string write_edges_tsv(const CoexpNetwork& n) {
    std::string out = "gene_a\tgene_b\tweight\n";
    for (const auto& [key, w] : n.edges) out += key.first + '\t' + key.second + '\t' + format_shortest(w) + '\n';
    return out;
}

std::string write_annotations_tsv(const CoexpNetwork& n) {
    std::string out = "gene_id\tannotation\n";
    for (const auto& [id, ann] : n.nodes) out += id + '\t' + ann + '\n';
    return out;
}

const char* to_string(Timepoint t) noexcept {
    switch (t) {
    case Timepoint::h3: return "3h";
    case Timepoint::h9: return "9h";
    case Timepoint::h24: return "24h";
    }
    return "?";
}

void DegTable::validate() const {
    std::set<std::pair<std::string, Timepoint>> seen;
    for (const auto& r : rows)
        if (!seen.emplace(r.gene, r.timepoint).second)
            fail(ErrorKind::format, "duplicate DEG row for gene '" + r.gene + "' at " + to_string(r.timepoint));
}

DegTable parse_deg_table(std::string_view tsv, const std::string& source) {
    DegTable t;
    const auto lines = split_lines(tsv);
    std::set<std::pair<std::string, Timepoint>> seen;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view line = lines[i];
        if (trim(line).empty() || line.front() == '#') continue;
        const auto f = split_fields(line, '\t');
        if (i == 0 && is_header(f[0], "gene_id")) continue;
        const std::string where = source + ": line " + std::to_string(i + 1);
        if (f.size() != 4) fail(ErrorKind::format, where + ": expected gene_id<TAB>timepoint<TAB>log2fc<TAB>significant");
        DegRow r;
        r.gene = std::string(trim(f[0]));
        const auto tp = trim(f[1]);
        if (tp == "3h") r.timepoint = Timepoint::h3;
        else if (tp == "9h") r.timepoint = Timepoint::h9;
        else if (tp == "24h") r.timepoint = Timepoint::h24;
        else fail(ErrorKind::format, where + ": timepoint must be 3h, 9h or 24h");
        if (!parse_double(f[2], r.log2fc)) fail(ErrorKind::format, where + ": bad log2fc '" + std::string(f[2]) + "'");
        const auto sig = trim(f[3]);
        if (sig != "0" && sig != "1") fail(ErrorKind::format, where + ": significant must be 0 or 1");
        r.significant = sig == "1";
        if (r.gene.empty()) fail(ErrorKind::format, where + ": empty gene id");
        if (!seen.emplace(r.gene, r.timepoint).second)
            fail(ErrorKind::format, where + ": duplicate row for '" + r.gene + "' at " + std::string(tp));
        t.rows.push_back(std::move(r));
    }
    return t;
}

DegTable load_deg_table(const std::filesystem::path& path) { return parse_deg_table(read_text_file(path), path.string()); }

std::vector<std::string> select_seeds(std::span<const PredictionRow> predictions, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) fail(ErrorKind::config, "threshold must lie strictly between 0 and 1");
    std::vector<const PredictionRow*> picked;
    for (const auto& p : predictions)
        if (p.probability > threshold) picked.push_back(&p);
    std::sort(picked.begin(), picked.end(), [](const PredictionRow* a, const PredictionRow* b) {
        if (a->probability != b->probability) return a->probability > b->probability;
        return a->id < b->id;
    });
    std::vector<std::string> ids;
    for (const auto* p : picked) ids.push_back(p->id);
    return ids;
}

Neighborhood neighborhood(const CoexpNetwork& n, std::span<const std::string> seeds, int hops) {
    require(hops >= 0, "hops must be >= 0");
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& [key, w] : n.edges) {
        adj[key.first].push_back(key.second);
        adj[key.second].push_back(key.first);
    }
    Neighborhood out;
    std::deque<std::pair<std::string, int>> queue;
    std::set<std::string> missing;
    for (const auto& s : seeds) {
        if (!n.nodes.count(s)) {
            if (missing.insert(s).second) out.missing_seeds.push_back(s);
            continue;
        }
        if (out.genes.insert(s).second) queue.emplace_back(s, 0);
    }
    while (!queue.empty()) {
        auto [g, d] = queue.front();
        queue.pop_front();
        if (d == hops) continue;
        for (const auto& nb : adj[g])
            if (out.genes.insert(nb).second) queue.emplace_back(nb, d + 1);
    }
    return out;
}

const std::vector<std::string>& default_keywords() {
    static const std::vector<std::string> k{"zinc finger", "zn finger", "metallothionein", "heavy metal", "superoxide dismutase",
                                            "catalase", "cadmium", "mercury", "metal transport"};
    return k;
}

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace

std::vector<KeywordHit> keyword_scan(const CoexpNetwork& n, const std::set<std::string>& genes, std::span<const std::string> keywords) {
    require(!keywords.empty(), "keyword list must be non-empty");
    std::vector<std::string> lowered;
    for (const auto& k : keywords) lowered.push_back(lower(k));
    std::vector<KeywordHit> hits;
    for (const auto& g : genes) {
        auto it = n.nodes.find(g);
        if (it == n.nodes.end() || it->second.empty()) continue;
        const std::string ann = lower(it->second);
        for (std::size_t k = 0; k < keywords.size(); ++k)
            if (!lowered[k].empty() && ann.find(lowered[k]) != std::string::npos) hits.push_back({g, keywords[k]});
    }
    return hits;
}

DegOverlap deg_overlap(const std::set<std::string>& genes, const DegTable& deg, bool significant_only) {
    std::set<std::string> hit;
    for (const auto& r : deg.rows)
        if (genes.count(r.gene) && (!significant_only || r.significant)) hit.insert(r.gene);
    DegOverlap out;
    out.genes.assign(hit.begin(), hit.end());
    for (const auto& r : deg.rows)
        if (hit.count(r.gene)) out.rows.push_back(r);
    std::stable_sort(out.rows.begin(), out.rows.end(), [](const DegRow& a, const DegRow& b) {
        if (a.gene != b.gene) return a.gene < b.gene;
        return a.timepoint < b.timepoint;
    });
    return out;
}

std::size_t TriageReport::keyword_gene_count() const {
    std::set<std::string> g;
    for (const auto& h : keyword_hits) g.insert(h.gene);
    return g.size();
}

TriageReport triage(const CoexpNetwork& n, std::span<const PredictionRow> predictions, const DegTable& deg, const TriageOptions& opt) {
    TriageReport r;
    r.hops = opt.hops;
    r.seeds = select_seeds(predictions, opt.threshold);
    const Neighborhood hood = neighborhood(n, r.seeds, opt.hops);
    r.missing_seeds = hood.missing_seeds;
    r.neighborhood.assign(hood.genes.begin(), hood.genes.end());
    r.keyword_hits = keyword_scan(n, hood.genes, opt.keywords);
    r.deg = deg_overlap(hood.genes, deg, opt.significant_only);
    return r;
}

std::string triage_text(const TriageReport& r, const CoexpNetwork& n) {
    std::string out;
    out += "seeds (" + std::to_string(r.seeds.size()) + "):";
    for (const auto& s : r.seeds) out += ' ' + s;
    out += '\n';
    if (!r.missing_seeds.empty()) {
        out += "seeds absent from network (" + std::to_string(r.missing_seeds.size()) + "):";
        for (const auto& s : r.missing_seeds) out += ' ' + s;
        out += '\n';
    }
    out += "neighborhood, " + std::to_string(r.hops) + " hop(s) (" + std::to_string(r.neighborhood.size()) + " genes):\n";
    for (const auto& g : r.neighborhood) {
        auto it = n.nodes.find(g);
        out += "  " + g;
        if (it != n.nodes.end() && !it->second.empty()) out += "  [" + it->second + "]";
        out += '\n';
    }
    out += "keyword hits (" + std::to_string(r.keyword_hits.size()) + " in " + std::to_string(r.keyword_gene_count()) + " genes):\n";
    for (const auto& h : r.keyword_hits) out += "  " + h.gene + "  \"" + h.keyword + "\"\n";
    out += "DEG overlap (" + std::to_string(r.deg.count()) + " genes):\n";
    for (const auto& row : r.deg.rows)
        out += "  " + row.gene + "  " + to_string(row.timepoint) + "  log2fc=" + format_fixed(row.log2fc, 3) +
               (row.significant ? "  significant" : "") + '\n';
    return out;
}

std::string triage_csv(const TriageReport& r) {
    std::string out = "gene,seed,annotation_hits,deg_timepoints,deg_log2fc\n";
    const std::unordered_set<std::string> seeds(r.seeds.begin(), r.seeds.end());
    for (const auto& g : r.neighborhood) {
        std::string hits, tps, fcs;
        for (const auto& h : r.keyword_hits)
            if (h.gene == g) hits += (hits.empty() ? "" : ";") + h.keyword;
        for (const auto& row : r.deg.rows)
            if (row.gene == g) {
                tps += (tps.empty() ? "" : ";") + std::string(to_string(row.timepoint)) + (row.significant ? "*" : "");
                fcs += (fcs.empty() ? "" : ";") + format_shortest(row.log2fc);
            }
        out += g + ',' + (seeds.count(g) ? "1" : "0") + ',' + hits + ',' + tps + ',' + fcs + '\n';
    }
    return out;
}

} // namespace genolang
