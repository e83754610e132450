#include "genolang/seqio.hpp"

#include "genolang/error.hpp"
#include "genolang/rng.hpp"
#include "genolang/text_io.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <unordered_set>

namespace genolang {

std::size_t LabeledDataset::count(Label l) const noexcept {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), l));
}

void LabeledDataset::push_back(SequenceRecord record, Label label) {
    records.push_back(std::move(record));
    labels.push_back(label);
}

void LabeledDataset::validate() const {
    require(records.size() == labels.size(), "dataset records/labels length mismatch");
    std::unordered_set<std::string_view> seen;
    for (const auto& r : records) {
        if (!seen.insert(r.id).second) fail(ErrorKind::duplicate_id, "duplicate id '" + r.id + "'");
    }
}

void SplitSpec::validate() const {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        fail(ErrorKind::config, "train_fraction must lie strictly between 0 and 1");
}

std::string clean_sequence(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char ch : raw) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (std::isspace(c) || std::isdigit(c)) continue;
        char u = static_cast<char>(std::toupper(c));
        switch (u) {
        case 'A': case 'C': case 'G': case 'T': out.push_back(u); break;
        case 'U': out.push_back('T'); break;
        default: out.push_back('N'); break;
        }
    }
    if (out.empty()) fail(ErrorKind::empty_sequence, "sequence is empty after cleaning");
    return out;
}

std::vector<SequenceRecord> parse_fasta(std::string_view text) {
    std::vector<SequenceRecord> records;
    std::unordered_set<std::string> ids;
    std::string body;
    std::size_t header_line = 0;

    auto flush = [&] {
        if (records.empty()) return;
        auto& rec = records.back();
        if (trim(body).empty())
            fail(ErrorKind::format, "line " + std::to_string(header_line) + ": empty sequence under header '" + rec.id + "'");
        try {
            rec.sequence = clean_sequence(body);
        } catch (const Error&) {
            fail(ErrorKind::format, "line " + std::to_string(header_line) + ": empty sequence under header '" + rec.id + "'");
        }
        body.clear();
    };

    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view line = lines[i];
        const std::size_t lineno = i + 1;
        if (!line.empty() && line.front() == '>') {
            flush();
            std::string_view header = trim(line.substr(1));
            std::size_t sp = header.find_first_of(" \t");
            SequenceRecord rec;
            rec.id = std::string(header.substr(0, sp));
            if (sp != std::string_view::npos) rec.description = std::string(trim(header.substr(sp)));
            if (rec.id.empty()) fail(ErrorKind::format, "line " + std::to_string(lineno) + ": header without id");
            if (!ids.insert(rec.id).second) fail(ErrorKind::duplicate_id, "duplicate id '" + rec.id + "'");
            records.push_back(std::move(rec));
            header_line = lineno;
        } else {
            if (trim(line).empty()) continue;
            if (records.empty())
                fail(ErrorKind::format, "line " + std::to_string(lineno) + ": sequence data before first header");
            body.append(line);
        }
    }
    flush();
    return records;
}

std::vector<SequenceRecord> read_fasta(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    try {
        return parse_fasta(text);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

std::string write_fasta(const std::vector<SequenceRecord>& records, std::size_t line_width) {
    std::string out;
    for (const auto& r : records) {
        out += '>';
        out += r.id;
        if (!r.description.empty()) {
            out += ' ';
            out += r.description;
        }
        out += '\n';
        for (std::size_t i = 0; i < r.sequence.size(); i += line_width) {
            out.append(r.sequence, i, line_width);
            out += '\n';
        }
    }
    return out;
}

namespace {

struct CsvColumns {
    std::size_t id = 0, sequence = 0, label = 0;
    bool has_label = false;
};

CsvColumns locate_columns(std::string_view header, const std::string& source, bool need_label) {
    const auto fields = split_fields(header, ',');
    auto find = [&](std::string_view name, std::size_t& out) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (trim(fields[i]) == name) {
                out = i;
                return true;
            }
        }
        return false;
    };
    CsvColumns cols;
    if (!find("id", cols.id)) fail(ErrorKind::schema, source + ": missing column 'id'");
    if (!find("sequence", cols.sequence)) fail(ErrorKind::schema, source + ": missing column 'sequence'");
    cols.has_label = find("label", cols.label);
    if (need_label && !cols.has_label) fail(ErrorKind::schema, source + ": missing column 'label'");
    return cols;
}

} // namespace

LabeledDataset parse_labeled_csv(std::string_view text, const std::string& source) {
    const auto lines = split_lines(text);
    if (lines.empty()) fail(ErrorKind::schema, source + ": empty file, missing column 'id'");
    const CsvColumns cols = locate_columns(lines[0], source, true);
    const std::size_t width = split_fields(lines[0], ',').size();

    LabeledDataset d;
    std::unordered_set<std::string> ids;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t row = i + 1;  // 1-based file line
        if (trim(lines[i]).empty()) continue;
        const auto fields = split_fields(lines[i], ',');
        const std::string where = source + ": row " + std::to_string(row);
        if (fields.size() != width)
            fail(ErrorKind::format, where + ": expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()));
        SequenceRecord rec;
        rec.id = std::string(trim(fields[cols.id]));
        if (rec.id.empty()) fail(ErrorKind::format, where + ": empty id");
        try {
            rec.sequence = clean_sequence(fields[cols.sequence]);
        } catch (const Error&) {
            fail(ErrorKind::format, where + ": empty sequence");
        }
        std::string_view lab = trim(fields[cols.label]);
        Label label;
        if (lab == "0") label = Label::not_related;
        else if (lab == "1") label = Label::related;
        else fail(ErrorKind::value, where + ": label '" + std::string(lab) + "' is not 0 or 1");
        if (!ids.insert(rec.id).second) fail(ErrorKind::duplicate_id, where + ": duplicate id '" + rec.id + "'");
        d.push_back(std::move(rec), label);
    }
    return d;
}

LabeledDataset load_labeled_csv(const std::filesystem::path& path) {
    return parse_labeled_csv(read_text_file(path), path.string());
}

std::string write_labeled_csv(const LabeledDataset& d) {
    std::string out = "id,sequence,label\n";
    for (std::size_t i = 0; i < d.size(); ++i) {
        out += d.records[i].id;
        out += ',';
        out += d.records[i].sequence;
        out += ',';
        out += d.labels[i] == Label::related ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::vector<SequenceRecord> load_records(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '>') return read_fasta(path);

    const auto lines = split_lines(text);
    if (lines.empty()) return {};
    const CsvColumns cols = locate_columns(lines[0], path.string(), false);
    const std::size_t width = split_fields(lines[0], ',').size();
    std::vector<SequenceRecord> out;
    std::unordered_set<std::string> ids;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const auto fields = split_fields(lines[i], ',');
        const std::string where = path.string() + ": row " + std::to_string(i + 1);
        if (fields.size() != width) fail(ErrorKind::format, where + ": wrong field count");
        SequenceRecord rec;
        rec.id = std::string(trim(fields[cols.id]));
        try {
            rec.sequence = clean_sequence(fields[cols.sequence]);
        } catch (const Error&) {
            fail(ErrorKind::format, where + ": empty sequence");
        }
        if (!ids.insert(rec.id).second) fail(ErrorKind::duplicate_id, where + ": duplicate id '" + rec.id + "'");
        out.push_back(std::move(rec));
    }
    return out;
}

std::string gene_key(std::string_view id) {
    std::size_t cut = id.find_first_of("-.");
    return std::string(id.substr(0, cut));
}

namespace {

// Units are single records, or gene groups when grouping is on.
struct Unit {
    std::vector<std::size_t> members;
};

} // namespace

DatasetSplit split_dataset(const LabeledDataset& d, const SplitSpec& s) {
    s.validate();
    require(d.records.size() == d.labels.size(), "dataset records/labels length mismatch");

    // Build units per class, in first-appearance order.
    std::vector<Unit> units[2];
    if (s.group_by_gene) {
        std::map<std::string, std::size_t> index[2];
        for (std::size_t i = 0; i < d.size(); ++i) {
            const int c = to_int(d.labels[i]);
            auto key = gene_key(d.records[i].id);
            auto [it, inserted] = index[c].try_emplace(key, units[c].size());
            if (inserted) units[c].push_back({});
            units[c][it->second].members.push_back(i);
        }
    } else {
        for (std::size_t i = 0; i < d.size(); ++i) units[to_int(d.labels[i])].push_back({{i}});
    }

    std::vector<char> in_train(d.size(), 0);
    Rng rng(s.seed);
    if (s.stratified) {
        for (int c = 0; c < 2; ++c) {
            std::size_t class_size = 0;
            for (const auto& u : units[c]) class_size += u.members.size();
            if (class_size < 2)
                fail(ErrorKind::stratification,
                     "class " + std::to_string(c) + " has " + std::to_string(class_size) + " member(s); stratified split needs at least 2");
            const auto target = static_cast<std::size_t>(s.train_fraction * static_cast<double>(class_size));
            std::vector<std::size_t> order(units[c].size());
            for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
            rng.shuffle(order);
            std::size_t taken = 0;
            for (std::size_t k : order) {
                const auto& u = units[c][k];
                if (taken + u.members.size() > target) {
                    if (!s.group_by_gene) break;
                    continue;
                }
                for (std::size_t m : u.members) in_train[m] = 1;
                taken += u.members.size();
            }
        }
    } else {
        std::vector<const Unit*> all;
        for (int c = 0; c < 2; ++c)
            for (const auto& u : units[c]) all.push_back(&u);
        // Restore dataset order before shuffling so the result only depends on the seed.
        std::sort(all.begin(), all.end(), [](const Unit* a, const Unit* b) { return a->members.front() < b->members.front(); });
        rng.shuffle(all);
        const auto target = static_cast<std::size_t>(s.train_fraction * static_cast<double>(d.size()));
        std::size_t taken = 0;
        for (const Unit* u : all) {
            if (taken + u->members.size() > target) {
                if (!s.group_by_gene) break;
                continue;
            }
            for (std::size_t m : u->members) in_train[m] = 1;
            taken += u->members.size();
        }
    }

    DatasetSplit out;
    for (std::size_t i = 0; i < d.size(); ++i) {
        auto& side = in_train[i] ? out.train : out.test;
        side.push_back(d.records[i], d.labels[i]);
    }
    return out;
}

} // namespace genolang
