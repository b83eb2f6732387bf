#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <sys/wait.h>

#include "spanemb/io.hpp"

using namespace spanemb;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(SPANEMB_CLI) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    std::string out;
    std::array<char, 4096> buf{};
    while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string dir() {
    auto d = std::filesystem::temp_directory_path() / "spanemb_cli_test";
    std::filesystem::create_directories(d);
    return d.string();
}

}  // namespace

TEST(Cli, NetworkVerify) {
    auto r = run("network verify --builder odd-even --n 8");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "sorting: true, depth: 6\n");
    EXPECT_EQ(run("network verify --builder brickwall --n 5 --mode perms").out, "sorting: true, depth: 5\n");
}

TEST(Cli, GadgetSixtyVertices) {
    const std::string out = dir() + "/g.json";
    auto r = run("gadget --k 6 --out " + out);
    EXPECT_EQ(r.code, 0);
    const json j = parse_json(read_file(out));
    EXPECT_EQ(j["graph"]["n"], 60);
    EXPECT_EQ(j["schema"], "v1");
    EXPECT_NO_THROW(gadget_from_json(j));
}

TEST(Cli, RouteWiring) {
    const std::string out = dir() + "/f.json";
    auto r = run("route --registers 4 --k 2 --phi 4,1,2,3 --out " + out);
    EXPECT_EQ(r.code, 0) << r.out;
    const json j = parse_json(read_file(out));
    const auto a = j["a"].get<std::vector<Vertex>>(), b = j["b"].get<std::vector<Vertex>>();
    const std::vector<std::size_t> want{3, 0, 1, 2};
    ASSERT_EQ(j["paths"].size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(j["paths"][i].front(), a[i]);
        EXPECT_EQ(j["paths"][i].back(), b[want[i]]);
    }
}

TEST(Cli, EmbedVerifyDeterministic) {
    const std::string d = dir();
    ASSERT_EQ(run("gen-host --n 600 --d 30 --seed 4 --out " + d + "/h.json").code, 0);
    ASSERT_EQ(run("gen-tree --kind path --n 600 --max-deg 2 --seed 4 --out " + d + "/t.json").code, 0);
    ASSERT_EQ(run("embed --host " + d + "/h.json --tree " + d + "/t.json --seed 4 --out " + d + "/e1.json").code, 0);
    ASSERT_EQ(run("embed --host " + d + "/h.json --tree " + d + "/t.json --seed 4 --out " + d + "/e2.json").code, 0);
    EXPECT_EQ(read_file(d + "/e1.json"), read_file(d + "/e2.json"));
    auto v = run("verify --host " + d + "/h.json --tree " + d + "/t.json --map " + d + "/e1.json");
    EXPECT_EQ(v.code, 0);
    EXPECT_EQ(v.out, "valid\n");
    EXPECT_EQ(run("export-dot --in " + d + "/h.json --out " + d + "/h.dot").code, 0);
    EXPECT_EQ(read_file(d + "/h.dot").rfind("graph G {", 0), 0u);
}

TEST(Cli, ExitCodes) {
    const std::string d = dir();
    EXPECT_EQ(run("network verify --n 8 --bogus").code, 2);
    EXPECT_EQ(run("gadget --k 5").code, 2);
    EXPECT_EQ(run("route --phi 1,1,2,3").code, 2);
    write_atomic(d + "/bad.json", "{\"n\": 3,\n \"edges\": [[0,1],]}");
    auto r = run("spectra --host " + d + "/bad.json");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find(":2:18:"), std::string::npos);
    write_atomic(d + "/bad.cfg", "D=8\nfoo=1\n");
    run("gen-host --n 600 --d 30 --seed 1 --out " + d + "/h1.json");
    run("gen-tree --kind path --n 600 --max-deg 2 --out " + d + "/t1.json");
    r = run("embed --host " + d + "/h1.json --tree " + d + "/t1.json --config " + d + "/bad.cfg");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("2:1"), std::string::npos);
    write_atomic(d + "/k2.cfg", "k_gadget=2\nattempts=1\n");
    r = run("embed --host " + d + "/h1.json --tree " + d + "/t1.json --config " + d + "/k2.cfg --out " + d + "/f.json");
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.out.find("template"), std::string::npos);
    EXPECT_EQ(parse_json(read_file(d + "/f.json"))["trace"]["failures"][0]["step"], "template");
}
