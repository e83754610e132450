#include "genolang/cli.hpp"
#include "genolang/text_io.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <vector>

namespace fs = std::filesystem;
using genolang::read_text_file;
using genolang::write_text_file;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = genolang::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("genolang_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

const std::vector<std::string> small_model_flags{
    "--max_len", "80", "--conv_layers", "4:6:1:2,4:4:1:global", "--embedding_dim", "6", "--epochs", "2", "--n_trees", "15"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("synth, train, evaluate, predict, importance end to end") {
    const auto dir = scratch("e2e");
    const std::string out = dir.string();
    auto r = run({"synth", "--task", "positional_motif", "--n_records", "220", "--seq_len", "80", "--out", out});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "data.csv"));
    CHECK(fs::exists(dir / "truth.csv"));
    CHECK(fs::exists(dir / "synth.manifest"));

    write_text_file(dir / "run.cfg", "# small run\ndata = " + (dir / "data.csv").string() + "\nout = " + out + "\nseed = 3\n");
    const std::string data_before = read_text_file(dir / "data.csv");
    r = run(with({"train", "--config", (dir / "run.cfg").string()}, small_model_flags));
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(fs::exists(dir / "model.json"));
    CHECK(fs::exists(dir / "train_log.csv"));
    CHECK(read_text_file(dir / "data.csv") == data_before);

    r = run({"evaluate", "--config", (dir / "run.cfg").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto metrics = read_text_file(dir / "metrics.csv");
    CHECK(metrics.rfind("run,seed,tp,fp,tn,fn,precision,recall,f1\n", 0) == 0);
    CHECK(genolang::split_lines(metrics).size() == 2);

    r = run({"predict", "--config", (dir / "run.cfg").string(), "--input", (dir / "data.csv").string(), "--threshold", "0.7"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto preds = read_text_file(dir / "predictions.csv");
    CHECK(preds.rfind("id,probability,predicted_label,selected\n", 0) == 0);
    CHECK(genolang::split_lines(preds).size() == 221);

    r = run({"importance", "--config", (dir / "run.cfg").string(), "--top_n", "5"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(genolang::split_lines(read_text_file(dir / "importance.csv")).size() == 6);

    const auto manifest = read_text_file(dir / "train.manifest");
    CHECK(manifest.find("# command: train") != std::string::npos);
    CHECK(manifest.find("# input: " + (dir / "data.csv").string() + " sha256:") != std::string::npos);
    CHECK(manifest.find("conv_layers = 4:6:1:2,4:4:1:global") != std::string::npos);
    CHECK(read_text_file(dir / "data.csv") == data_before);
    fs::remove_all(dir);
}

TEST_CASE("a manifest can be replayed as a config file") {
    const auto dir = scratch("replay");
    auto r = run({"synth", "--n_records", "50", "--seq_len", "40", "--out", dir.string(), "--seed", "11"});
    REQUIRE(r.code == 0);
    const auto first = read_text_file(dir / "data.csv");
    fs::rename(dir / "synth.manifest", dir / "replay.cfg");
    fs::remove(dir / "data.csv");
    r = run({"synth", "--config", (dir / "replay.cfg").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(read_text_file(dir / "data.csv") == first);
    fs::remove_all(dir);
}

TEST_CASE("ingest from FASTA") {
    const auto dir = scratch("ingest");
    write_text_file(dir / "pos.fa", ">p1\nACGTACGT\n>p2\nTTTTAAAA\n");
    write_text_file(dir / "neg.fa", ">n1\nGGGGCCCC\n");
    auto r = run({"ingest", "--positives", (dir / "pos.fa").string(), "--negatives", (dir / "neg.fa").string(), "--out", dir.string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(read_text_file(dir / "data.csv") == "id,sequence,label\np1,ACGTACGT,1\np2,TTTTAAAA,1\nn1,GGGGCCCC,0\n");
    r = run({"featurize", "--data", (dir / "data.csv").string(), "--out", dir.string(), "--kmer_sizes", "2"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(read_text_file(dir / "features.csv").rfind("id,length,gc_content,", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("exit codes") {
    const auto dir = scratch("codes");
    auto r = run({"train", "--config", (dir / "nope.cfg").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find((dir / "nope.cfg").string()) != std::string::npos);
    CHECK(r.out.empty());

    r = run({"synth", "--no_such_key", "1", "--out", dir.string()});
    CHECK(r.code == 2);
    r = run({"frobnicate"});
    CHECK(r.code == 2);
    r = run({"train", "--max_len", "10", "--conv_layers", "4:20:1:1", "--data", "x.csv"});
    CHECK(r.code == 2);

    write_text_file(dir / "bad.fa", "ACGT\n>x\nAC\n");
    write_text_file(dir / "neg.fa", ">n\nAC\n");
    r = run({"ingest", "--positives", (dir / "bad.fa").string(), "--negatives", (dir / "neg.fa").string(), "--out", dir.string()});
    CHECK(r.code == 3);
    CHECK(r.err.find("bad.fa") != std::string::npos);
    CHECK(r.err.find("line 1") != std::string::npos);

    write_text_file(dir / "bad.csv", "id,sequence,label\na,ACGT,1\nb,ACGT,7\n");
    r = run({"train", "--data", (dir / "bad.csv").string(), "--out", dir.string()});
    CHECK(r.code == 3);
    CHECK(r.err.find("row 3") != std::string::npos);

    r = run({"help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("n_trees") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("coexp triage from files") {
    const auto dir = scratch("coexp");
    write_text_file(dir / "predictions.csv", "id,probability,predicted_label,selected\nA,0.900000,1,1\nB,0.600000,1,0\n");
    write_text_file(dir / "edges.tsv", "A\tB\nB\tC\n");
    write_text_file(dir / "ann.tsv", "A\tunknown\nB\tMetallothionein\nC\tZinc finger\n");
    write_text_file(dir / "deg.tsv", "B\t9h\t2.0\t1\n");
    auto r = run({"coexp", "--out", dir.string(), "--edges", (dir / "edges.tsv").string(), "--annotations", (dir / "ann.tsv").string(),
                  "--deg", (dir / "deg.tsv").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(read_text_file(dir / "triage.csv") == "gene,seed,annotation_hits,deg_timepoints,deg_log2fc\nA,1,,,\nB,0,metallothionein,9h*,2\n");
    CHECK(fs::exists(dir / "triage.txt"));
    fs::remove_all(dir);
}

}
