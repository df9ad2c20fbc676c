#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>

#include "json.hpp"
#include "test_support.hpp"

using sbest::testing::read_csv;
using sbest::testing::scratch_dir;
using sbest::testing::slurp;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kData = SBEST_TEST_DATA;
const fs::path kCorpus = kData / "corpus";

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run cli(const std::string& args) {
    static const fs::path dir = scratch_dir("cli_io");
    const auto out = dir / "stdout", err = dir / "stderr";
    const std::string cmd = std::string("'") + SBEST_CLI + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

std::string buggy_of(const fs::path& bug) {
    auto s = slurp(bug / "buggy_methods.txt");
    return s.substr(0, s.find('\n'));
}

}  // namespace

TEST_CASE("parse-trace") {
    const auto ok = cli("parse-trace " + q(kData / "traces" / "03_caused_by_chain.txt"));
    CHECK(ok.code == 0);
    CHECK(json::parse(ok.out) == json::parse(slurp(kData / "traces" / "03_caused_by_chain.json")));

    const auto dir = scratch_dir("cli_parse");
    std::ofstream(dir / "empty.txt");
    const auto empty = cli("parse-trace " + q(dir / "empty.txt"));
    CHECK(empty.code == 0);
    CHECK(json::parse(empty.out) == json::array());

    CHECK(cli("parse-trace " + q(dir)).code == 2);
    const auto missing = cli("parse-trace " + q(dir / "missing.txt"));
    CHECK(missing.code != 0);
    CHECK_FALSE(missing.err.empty());
}

TEST_CASE("localize") {
    const auto bug = kCorpus / "Alpha" / "1";
    const auto r = cli("localize " + q(bug));
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    CHECK(header == "rank,method,score");
    CHECK(sbest::testing::split_csv_row(first)[1] == buggy_of(bug));

    const auto js = cli("localize " + q(bug) + " --format json --technique SB_ONLY --x 4 --m 2");
    REQUIRE(js.code == 0);
    const auto doc = json::parse(js.out);
    CHECK(doc["metadata"]["technique"] == "SB_ONLY");
    CHECK(doc["metadata"]["x"] == 4);
    CHECK(doc["metadata"]["m"] == 2);
    CHECK(doc["ranking"].size() > 5);

    const auto explain = cli("localize " + q(bug) + " --explain");
    REQUIRE(explain.code == 0);
    const auto ex = json::parse(explain.out);
    const auto& per_test = ex["proxy_selection"]["per_test"];
    CHECK(per_test.size() == read_csv(bug / "tests.csv").size());
    for (const auto& t : per_test) CHECK(t["st_covered_lines"].get<int>() >= 0);
    for (const auto& m : ex["methods"])
        CHECK(m["total"].get<double>() - m["st_score"].get<double>() == m["sb_score"].get<double>());

    // Alpha/2 has no failing tests.
    const auto zero = cli("localize " + q(kCorpus / "Alpha" / "2") + " --technique OCHIAI --format json");
    REQUIRE(zero.code == 0);
    for (const auto& e : json::parse(zero.out)["ranking"]) CHECK(e["score"] == 0.0);
    CHECK(zero.err.find("no failing tests") != std::string::npos);
    CHECK_FALSE(json::parse(zero.out)["metadata"]["warnings"].empty());
}

TEST_CASE("bad arguments exit 2") {
    CHECK(cli("").code == 2);
    CHECK(cli("frobnicate").code == 2);
    CHECK(cli("localize " + q(kCorpus / "Alpha" / "1") + " --technique TARANTULA").code == 2);
    CHECK(cli("localize " + q(kCorpus / "Alpha" / "1") + " --x 0").code == 2);
    CHECK(cli("localize " + q(kCorpus / "Alpha" / "1") + " --format xml").code == 2);
    CHECK(cli("sweep " + q(kCorpus) + " --x-grid 5,,x").code == 2);
    CHECK(cli("--help").code == 0);
}

TEST_CASE("evaluate") {
    const auto r = cli("evaluate " + q(kCorpus));
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "system,n_bugs,technique,top1,top3,top5,map,mrr");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 12);

    const auto paper = cli("evaluate " + q(kCorpus) + " --paper-mode --technique OCHIAI");
    REQUIRE(paper.code == 0);
    CHECK(paper.out.find("Alpha,2,OCHIAI") != std::string::npos);

    const auto root = scratch_dir("cli_malformed");
    fs::copy(kCorpus, root, fs::copy_options::recursive);
    std::ofstream(root / "Alpha" / "3" / "tests.csv") << "name,outcome\nT#a,MAYBE\n";
    const auto skipped = cli("evaluate " + q(root));
    CHECK(skipped.code == 0);
    CHECK(skipped.err.find("Alpha/3") != std::string::npos);
    CHECK(skipped.out.find("Alpha,2,SBEST") != std::string::npos);

    const auto empty = scratch_dir("cli_empty_corpus");
    CHECK(cli("evaluate " + q(empty)).code == 1);
    CHECK(cli("evaluate " + q(empty / "nothing")).code != 0);
}

TEST_CASE("sweep") {
    const auto r = cli("sweep " + q(kCorpus) + " --x-grid 15,5 --m-grid 5,1");
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::vector<std::string> keys;
    std::getline(in, line);
    CHECK(line == "x,m,n_bugs,top1,top3,top5,map,mrr");
    while (std::getline(in, line)) keys.push_back(line.substr(0, line.find(',', line.find(',') + 1)));
    CHECK(keys == std::vector<std::string>{"15,5", "15,1", "5,5", "5,1"});
}

TEST_CASE("distance") {
    const auto chain = cli("distance " + q(kCorpus / "Beta" / "1") + " --format json");
    REQUIRE(chain.code == 0);
    const auto doc = json::parse(chain.out);
    CHECK(doc["distance"] == 3);
    CHECK(doc["witness_path"].size() == 4);
    CHECK(doc["witness_path"].back() == buggy_of(kCorpus / "Beta" / "1"));

    const auto member = cli("distance " + q(kCorpus / "Beta" / "2") + " --format json");
    REQUIRE(member.code == 0);
    CHECK(json::parse(member.out)["distance"] == 0);

    const auto missing = cli("distance " + q(kCorpus / "Alpha" / "1"));
    CHECK(missing.code == 3);
    CHECK(missing.err.find("callgraph.csv") != std::string::npos);

    const auto corpus = cli("distance " + q(kCorpus));
    CHECK(corpus.code == 0);
    CHECK(corpus.out.find("mean_distance=1.50000") != std::string::npos);
}
