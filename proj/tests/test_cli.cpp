#include "doctest.h"
#include "support.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

using namespace nb_test;

namespace {

const std::string kCli = NEURAL_BRANE_CLI;

struct Run {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Run run(const std::filesystem::path& dir, const std::string& args, const std::string& env = "") {
    const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
    const std::string cmd = "cd '" + dir.string() + "' && " + env + " '" + kCli + "' " + args + " >'" +
                            out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::string toy_args() {
    const auto f = toy_files();
    return "--edges '" + f.edges.string() + "' --attributes '" + f.attributes.string() + "' --labels '" +
           f.labels->string() + "'";
}

const std::string kSmall = " --d1 3 --d2 3 --hidden 4 --epochs 2";

} // namespace

TEST_SUITE("cli") {

TEST_CASE("train on the toy graph writes five embedding rows") {
    const auto dir = scratch_dir("cli_train");
    const auto r = run(dir, "train " + toy_args() + kSmall + " --log-file log.csv");
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto emb = lines(slurp(dir / "embeddings.txt"));
    REQUIRE(emb.size() == 6);
    CHECK(emb[0] == "5 4");
    CHECK(std::filesystem::exists(dir / "model.nbrn"));
    const auto log = lines(slurp(dir / "log.csv"));
    REQUIRE(log.size() == 3);
    CHECK(log[0] == "epoch,loss,seconds,triplets,ranking_loss,reg_loss");
    CHECK(log[1].rfind("1,", 0) == 0);
    // The effective configuration is echoed to the log stream.
    CHECK(r.err.find("lr=0.5") != std::string::npos);
}

TEST_CASE("train log goes to stdout by default") {
    const auto dir = scratch_dir("cli_stdout");
    const auto r = run(dir, "train " + toy_args() + kSmall);
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("epoch,loss,seconds,triplets", 0) == 0);
}

TEST_CASE("same seed twice gives byte-identical embeddings") {
    const auto dir = scratch_dir("cli_seed");
    REQUIRE(run(dir, "train " + toy_args() + kSmall + " --seed 1 --embeddings a.txt --checkpoint a.nbrn").code == 0);
    REQUIRE(run(dir, "train " + toy_args() + kSmall + " --seed 1 --embeddings b.txt --checkpoint b.nbrn").code == 0);
    REQUIRE(run(dir, "train " + toy_args() + kSmall + " --seed 2 --embeddings c.txt --checkpoint c.nbrn").code == 0);
    CHECK(slurp(dir / "a.txt") == slurp(dir / "b.txt"));
    CHECK(slurp(dir / "a.nbrn") == slurp(dir / "b.nbrn"));
    CHECK(slurp(dir / "a.txt") != slurp(dir / "c.txt"));
}

TEST_CASE("input errors exit with status 1 and a one-line diagnostic") {
    const auto dir = scratch_dir("cli_errors");
    const auto f = toy_files();
    const auto r = run(dir, "train --edges '" + f.edges.string() + "' --attributes /no/such/attrs.txt" + kSmall);
    CHECK(r.code == 1);
    CHECK(r.err.find("/no/such/attrs.txt") != std::string::npos);
    const auto err_lines = lines(r.err);
    std::size_t errors = 0;
    for (const auto& l : err_lines) errors += l.find("[error]") != std::string::npos;
    CHECK(errors == 1);

    CHECK(run(dir, "train " + toy_args() + " --pooling mean").code == 1);
    CHECK(run(dir, "train " + toy_args() + " --batch-size 0").code == 1);
    CHECK(run(dir, "no-such-command").code == 1);
    CHECK(run(dir, "").code == 1);
}

TEST_CASE("--help documents every flag with its default") {
    const auto dir = scratch_dir("cli_help");
    const auto r = run(dir, "train --help");
    REQUIRE(r.code == 0);
    for (const char* flag : {"--d1", "--d2", "--hidden", "--lr", "--lambda", "--batch-size", "--epochs", "--seed",
                             "--pooling", "--grad-agg", "--tol", "--config", "--threads", "--export-layer"}) {
        CHECK_MESSAGE(r.out.find(flag) != std::string::npos, flag);
    }
    for (const char* def : {"[75]", "[150]", "[0.5]", "[5e-05]", "[100]", "[30]", "[42]", "[max]", "[mean]", "[0.0001]"}) {
        CHECK_MESSAGE(r.out.find(def) != std::string::npos, def);
    }
    for (const char* sub : {"embed", "evaluate", "project", "ablate-pooling", "synth"}) {
        CHECK(run(dir, std::string(sub) + " --help").code == 0);
    }
    const auto ev = run(dir, "evaluate --help");
    CHECK(ev.out.find("[0.3,0.5,0.7]") != std::string::npos);
    CHECK(ev.out.find("[7]") != std::string::npos);
}

TEST_CASE("config file values apply and flags override them") {
    const auto dir = scratch_dir("cli_config");
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "# small model\nd1 = 2\nd2=2\nhidden=3\nepochs=1\nseed=9\n";
    }
    REQUIRE(run(dir, "train " + toy_args() + " --config run.cfg --embeddings a.txt").code == 0);
    CHECK(lines(slurp(dir / "a.txt"))[0] == "5 3");
    REQUIRE(run(dir, "train --config run.cfg " + toy_args() + " --hidden 5 --embeddings b.txt").code == 0);
    CHECK(lines(slurp(dir / "b.txt"))[0] == "5 5");
    {
        std::ofstream cfg(dir / "bad.cfg");
        cfg << "not a pair\n";
    }
    CHECK(run(dir, "train " + toy_args() + " --config bad.cfg").code == 1);
    {
        std::ofstream cfg(dir / "unknown.cfg");
        cfg << "colour=blue\n";
    }
    CHECK(run(dir, "train " + toy_args() + " --config unknown.cfg").code == 1);
}

TEST_CASE("embed reproduces the embeddings written by train") {
    const auto dir = scratch_dir("cli_embed");
    REQUIRE(run(dir, "train " + toy_args() + kSmall + " --pooling sum --format binary --embeddings t.bin").code == 0);
    REQUIRE(run(dir, "embed " + toy_args() + " --checkpoint model.nbrn --pooling sum --format binary --embeddings e.bin")
                .code == 0);
    CHECK(slurp(dir / "t.bin") == slurp(dir / "e.bin"));
    CHECK(slurp(dir / "t.bin").substr(0, 4) == "NBRN");
    REQUIRE(run(dir, "embed " + toy_args() + " --checkpoint model.nbrn --export-layer f --embeddings f.txt").code == 0);
    CHECK(lines(slurp(dir / "f.txt"))[0] == "5 6");
    // A checkpoint for a different graph shape is refused.
    const auto f = toy_files();
    CHECK(run(dir, "embed " + toy_args() + " --nodes 9 --checkpoint model.nbrn").code == 1);
}

TEST_CASE("evaluate and project") {
    const auto dir = scratch_dir("cli_eval");
    REQUIRE(run(dir, "synth --prefix pp --nodes 40").code == 0);
    const std::string graph = "--edges pp.edges --attributes pp.attrs --labels pp.labels";
    REQUIRE(run(dir, "train " + graph + " --d1 4 --d2 4 --hidden 6 --epochs 2 --triplets-per-epoch 2000").code == 0);

    auto r = run(dir, "evaluate --embeddings embeddings.txt --labels pp.labels --task classify --repeats 3");
    REQUIRE_MESSAGE(r.code == 0, r.err);
    auto csv = lines(slurp(dir / "report.csv"));
    REQUIRE(csv.size() == 4);
    CHECK(csv[0] == "task,train_ratio,repeats,macro_f1_mean,macro_f1_std");
    CHECK(csv[3].rfind("classify,0.7,3,", 0) == 0);
    CHECK(r.out.find("Macro-F1") != std::string::npos);

    r = run(dir, "evaluate --embeddings embeddings.txt --labels pp.labels --task cluster --runs 2 --output c.csv");
    REQUIRE(r.code == 0);
    csv = lines(slurp(dir / "c.csv"));
    REQUIRE(csv.size() == 2);
    CHECK(csv[1].rfind("cluster,2,2,", 0) == 0);

    r = run(dir, "evaluate --embeddings embeddings.txt --labels pp.labels --task project");
    REQUIRE(r.code == 0);
    csv = lines(slurp(dir / "projection.csv"));
    REQUIRE(csv.size() == 41);
    CHECK(csv[0] == "node-id,x,y,label");
    CHECK(csv[1].rfind("0,", 0) == 0);

    r = run(dir, "project --embeddings embeddings.txt --output p.csv");
    REQUIRE(r.code == 0);
    CHECK(lines(slurp(dir / "p.csv"))[0] == "node-id,x,y");

    CHECK(run(dir, "evaluate --embeddings embeddings.txt --labels pp.labels --ratios 0.5,1.5").code == 1);
    CHECK(run(dir, "evaluate --embeddings missing.txt --labels pp.labels").code == 1);
}

TEST_CASE("ablate-pooling reports max and sum under one triplet stream") {
    const auto dir = scratch_dir("cli_ablate");
    REQUIRE(run(dir, "synth --prefix pp --nodes 30").code == 0);
    const auto r = run(dir, "ablate-pooling --edges pp.edges --attributes pp.attrs --labels pp.labels "
                            "--d1 3 --d2 3 --hidden 4 --epochs 1 --triplets-per-epoch 500 --repeats 2");
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto csv = lines(slurp(dir / "ablation.csv"));
    REQUIRE(csv.size() == 3);
    CHECK(csv[1].rfind("max,", 0) == 0);
    CHECK(csv[2].rfind("sum,", 0) == 0);
    const auto digest = [](const std::string& line) { return line.substr(line.rfind(',') + 1); };
    CHECK(digest(csv[1]) == digest(csv[2]));
    CHECK(r.out.find("max-pooling Macro-F1") != std::string::npos);
    CHECK(r.out.find("sum-pooling Macro-F1") != std::string::npos);

    CHECK(run(dir, "ablate-pooling --edges pp.edges --attributes pp.attrs").code == 1);  // labels required
}

TEST_CASE("NEURAL_BRANE_LOG controls verbosity") {
    const auto dir = scratch_dir("cli_log");
    const auto quiet = run(dir, "train " + toy_args() + kSmall, "NEURAL_BRANE_LOG=warn");
    REQUIRE(quiet.code == 0);
    CHECK(quiet.err.find("[info]") == std::string::npos);
    const auto loud = run(dir, "train " + toy_args() + kSmall, "NEURAL_BRANE_LOG=debug");
    CHECK(loud.err.find("[debug]") != std::string::npos);
}

} // TEST_SUITE
