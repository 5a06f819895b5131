// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int status = -1;
    std::string out;
};

Result cli(const std::string& args) {
    const std::string cmd = std::string(SMOOTHREAD_CLI) + " " + args + " 2>/dev/null";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int raw = pclose(p);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

fs::path scratch() {
    const auto d = fs::temp_directory_path() / "smoothread_cli";
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("help and usage errors") {
    CHECK(cli("--help").status == 0);
    CHECK(cli("").status != 0);
    CHECK(cli("run").status != 0);
    CHECK(cli("run --input x --strategy sideways").status != 0);
}

TEST_CASE("gen is reproducible under --seed") {
    const auto d = scratch();
    REQUIRE(cli("--seed 9 gen niah --tokens 4096 --count 2 --out " + q(d / "a.jsonl")).status == 0);
    REQUIRE(cli("--seed 9 gen niah --tokens 4096 --count 2 --out " + q(d / "b.jsonl")).status == 0);
    REQUIRE(cli("--seed 10 gen niah --tokens 4096 --count 2 --out " + q(d / "c.jsonl")).status == 0);
    CHECK(slurp(d / "a.jsonl") == slurp(d / "b.jsonl"));
    CHECK(slurp(d / "a.jsonl") != slurp(d / "c.jsonl"));
    REQUIRE(cli("--seed 2 gen passage-count --unique 4 --count 1 --out " + q(d / "p.jsonl")).status == 0);
    CHECK(json::parse(slurp(d / "p.jsonl"))["gold"] == json::array({"4"}));
}

TEST_CASE("chunk from a file") {
    const auto d = scratch();
    std::ofstream(d / "t.txt") << "One two three four five six.\n\nSeven eight nine ten eleven twelve.\n";
    auto r = cli("chunk --max-tokens 10 --input " + q(d / "t.txt"));
    REQUIRE(r.status == 0);
    const auto j = json::parse(r.out);
    CHECK(j.size() == 2);
    r = cli("--seed 5 --format csv chunk --max-tokens 10 --input " + q(d / "t.txt"));
    CHECK(r.out.rfind("# seed=5\n", 0) == 0);
    CHECK(cli("chunk --preset nope --input " + q(d / "t.txt")).status == 2);
}

TEST_CASE("run, records and report") {
    const auto d = scratch();
    REQUIRE(cli("--seed 3 gen niah --tokens 4096 --count 2 --out " + q(d / "items.jsonl")).status == 0);
    const auto r = cli("--seed 3 run --strategy smooth --backend sim-swa --window 4096 --preset niah-swa --input " +
                       q(d / "items.jsonl") + " --records " + q(d / "runs.jsonl"));
    REQUIRE(r.status == 0);
    const auto j = json::parse(r.out);
    CHECK(j["chunk_tokens"] == 2048);
    CHECK(j["seed"] == 3);
    for (const auto& rec : j["records"]) CHECK(rec["score"] == 1.0);

    const auto rep = cli("--seed 3 --format csv report --runs " + q(d / "runs.jsonl"));
    REQUIRE(rep.status == 0);
    CHECK(rep.out.rfind("# seed=3\n", 0) == 0);
    CHECK(rep.out.find("smooth,sim-swa,4096,2048,on,2,100.00") != std::string::npos);

    CHECK(cli("run --input /nonexistent/items.jsonl").status == 3);
    CHECK(cli("run --input " + q(d / "items.jsonl") + " --backend remote --endpoint notaurl").status != 0);
}

TEST_CASE("sweep, eval and cost outputs carry the seed") {
    const auto d = scratch();
    REQUIRE(cli("--seed 4 gen niah --tokens 4096 --count 2 --out " + q(d / "s.jsonl")).status == 0);
    auto r = cli("--seed 4 --format csv sweep --suite " + q(d / "s.jsonl") + " --windows 1024,4096 --chunks 512");
    REQUIRE(r.status == 0);
    CHECK(r.out.rfind("# seed=4\n", 0) == 0);
    CHECK(cli("sweep --suite " + q(d / "s.jsonl") + " --windows 1024 --ratio 1:2 --chunks 512").status == 2);

    std::ofstream(d / "answers.jsonl") << "{\"id\":\"none\",\"answer\":\"x\"}\n";
    r = cli("--seed 4 eval --items " + q(d / "s.jsonl") + " --answers " + q(d / "answers.jsonl"));
    REQUIRE(r.status == 0);
    const auto e = json::parse(r.out);
    CHECK(e["seed"] == 4);
    CHECK(e["score"] == 0.0);

    r = cli("--seed 4 cost --lengths 1000,2000");
    REQUIRE(r.status == 0);
    const auto c = json::parse(r.out);
    CHECK(c["rows"].size() == 2);
    CHECK(cli("cost --c 0").status == 2);
}

TEST_CASE("dataset build writes all formats") {
    const auto d = scratch();
    REQUIRE(cli("--seed 6 gen niah --tokens 3000 --count 3 --out " + q(d / "raw.jsonl")).status == 0);
    fs::remove_all(d / "ds");
    REQUIRE(cli("--seed 6 --out " + q(d / "ds") + " dataset build --raw " + q(d / "raw.jsonl")).status == 0);
    for (const char* f : {"sr.jsonl", "ur.jsonl", "os.jsonl", "report.json"}) CHECK(fs::exists(d / "ds" / f));
    const auto rep = json::parse(slurp(d / "ds" / "report.json"));
    CHECK(rep["seed"] == 6);
    CHECK(rep["formats"]["sr"]["kept"] == 3);
}
