#include <doctest.h>

#include "alid/dataset.hpp"
#include "alid/errors.hpp"
#include "alid/lsh.hpp"
#include "alid/oracle.hpp"
#include "alid/rng.hpp"

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

using namespace alid;

namespace {

// two tight 2-D blobs far apart plus a few strays
DataSet blobs(std::uint64_t seed = 3, int per = 40) {
    Rng rng(seed);
    std::vector<float> pts;
    for (int i = 0; i < per; ++i) {
        pts.push_back(static_cast<float>(0.0 + rng.next_gaussian() * 0.3));
        pts.push_back(static_cast<float>(0.0 + rng.next_gaussian() * 0.3));
    }
    for (int i = 0; i < per; ++i) {
        pts.push_back(static_cast<float>(20.0 + rng.next_gaussian() * 0.3));
        pts.push_back(static_cast<float>(20.0 + rng.next_gaussian() * 0.3));
    }
    for (int i = 0; i < 10; ++i) {
        pts.push_back(static_cast<float>(rng.uniform(-40.0, 60.0)));
        pts.push_back(static_cast<float>(rng.uniform(-40.0, 60.0)));
    }
    return DataSet(std::move(pts), 2, KernelParams{});
}

} // namespace

TEST_CASE("same seed builds the same index, different seed differs") {
    auto ds = blobs();
    LshIndex a(ds, LshParams{6, 8, 2.0, 42});
    LshIndex b(ds, LshParams{6, 8, 2.0, 42});
    LshIndex c(ds, LshParams{6, 8, 2.0, 43});
    bool all_same = true, any_diff = false;
    for (std::int32_t i = 0; i < ds.size(); ++i) {
        if (a.query(i) != b.query(i)) all_same = false;
        if (a.query(i) != c.query(i)) any_diff = true;
    }
    CHECK(all_same);
    CHECK(any_diff);
}

TEST_CASE("queries are sorted, unique, and never contain the query point") {
    auto ds = blobs();
    LshIndex index(ds, LshParams{4, 10, 3.0, 1});
    for (std::int32_t i = 0; i < ds.size(); ++i) {
        auto hits = index.query(i);
        CHECK(std::is_sorted(hits.begin(), hits.end()));
        CHECK(std::adjacent_find(hits.begin(), hits.end()) == hits.end());
        CHECK(!std::binary_search(hits.begin(), hits.end(), i));
    }
}

TEST_CASE("near neighbors collide and far points mostly do not") {
    auto ds = blobs();
    LshIndex index(ds, LshParams{4, 12, 3.0, 7});
    int found = 0, total = 0;
    for (std::int32_t i = 0; i < 40; ++i) {
        auto hits = index.query(i);
        for (std::int32_t j = 0; j < 40; ++j) {
            if (j == i) continue;
            ++total;
            if (std::binary_search(hits.begin(), hits.end(), j)) ++found;
        }
        // the other blob lives 28 units away: collisions there should be rare
        int far = 0;
        for (std::int32_t j = 40; j < 80; ++j)
            if (std::binary_search(hits.begin(), hits.end(), j)) ++far;
        CHECK(far <= 4);
    }
    CHECK(static_cast<double>(found) / total >= 0.9);
}

TEST_CASE("removal is logical, idempotent and survives compaction") {
    auto ds = blobs();
    LshIndex index(ds, LshParams{4, 6, 3.0, 5});
    CHECK(index.live_count() == ds.size());

    std::vector<std::int32_t> gone = {0, 1, 2, 3, 4, 5, 6, 7};
    index.remove_points(gone);
    index.remove_points(gone); // idempotent
    CHECK(index.live_count() == ds.size() - 8);
    for (auto g : gone) {
        CHECK(index.is_removed(g));
        CHECK_THROWS_AS(index.query(g), NotIndexed);
    }
    // removed points never appear in anyone's hits
    for (std::int32_t i = 8; i < ds.size(); ++i) {
        auto hits = index.query(i);
        for (auto g : gone) CHECK(!std::binary_search(hits.begin(), hits.end(), g));
    }
    // force heavy removal: compaction keeps live members intact
    std::vector<std::int32_t> most;
    for (std::int32_t i = 8; i < 38; ++i) most.push_back(i);
    index.remove_points(most);
    CHECK(index.live_count() == ds.size() - 38);
    auto hits = index.query(38);
    CHECK(std::binary_search(hits.begin(), hits.end(), 39));
}

TEST_CASE("bucket statistics and members agree") {
    auto ds = blobs();
    LshIndex index(ds, LshParams{4, 3, 3.0, 11});
    std::int64_t sum = 0;
    for (const auto& st : index.bucket_stats()) {
        auto members = index.bucket_members(st.table, st.bucket);
        CHECK(static_cast<std::int64_t>(members.size()) == st.live_size);
        CHECK(std::is_sorted(members.begin(), members.end()));
        sum += st.live_size;
    }
    CHECK(sum == ds.size() * 3); // each live point sits in one bucket per table
    CHECK_THROWS_AS(index.bucket_members(99, 0), IndexOutOfRange);
}

TEST_CASE("save and load round trip the whole index") {
    auto ds = blobs();
    LshIndex index(ds, LshParams{5, 7, 2.5, 9});
    index.remove_points(std::vector<std::int32_t>{3, 17});
    const std::string path = "/tmp/alid_lsh_rt.bin";
    index.save(path);

    auto back = LshIndex::load(path, ds);
    CHECK(back.live_count() == index.live_count());
    CHECK(back.params().mu == 5);
    CHECK(back.params().tables == 7);
    for (std::int32_t i = 0; i < ds.size(); ++i) {
        if (index.is_removed(i)) {
            CHECK(back.is_removed(i));
            continue;
        }
        CHECK(back.query(i) == index.query(i));
    }

    // dimension mismatch is rejected
    std::vector<float> other(static_cast<std::size_t>(ds.size()) * 3, 0.0f);
    DataSet ds3(std::move(other), 3, KernelParams{});
    CHECK_THROWS_AS(LshIndex::load(path, ds3), FormatError);

    // truncated file is rejected
    {
        std::FILE* f = std::fopen(path.c_str(), "rb");
        REQUIRE(f);
        std::fseek(f, 0, SEEK_END);
        const long len = std::ftell(f);
        std::fclose(f);
        std::string cmd; // truncate via std::filesystem-free approach
        (void)cmd;
        std::FILE* g = std::fopen("/tmp/alid_lsh_trunc.bin", "wb");
        REQUIRE(g);
        std::FILE* h = std::fopen(path.c_str(), "rb");
        std::vector<char> buf(static_cast<std::size_t>(len) / 2);
        REQUIRE(std::fread(buf.data(), 1, buf.size(), h) == buf.size());
        std::fclose(h);
        REQUIRE(std::fwrite(buf.data(), 1, buf.size(), g) == buf.size());
        std::fclose(g);
    }
    CHECK_THROWS_AS(LshIndex::load("/tmp/alid_lsh_trunc.bin", ds), FormatError);
}

TEST_CASE("multi-table union approaches the exact range query on blobs") {
    auto ds = blobs(21);
    LshIndex index(ds, LshParams{4, 16, 3.0, 2});
    // all blob-1 members are within this radius of point 0's location
    std::vector<double> center = {ds.point(0)[0], ds.point(0)[1]};
    auto exact = oracle::exact_range_query(ds, center, 3.0);
    auto hits = index.query(0);
    int covered = 0, wanted = 0;
    for (auto e : exact) {
        if (e == 0) continue;
        ++wanted;
        if (std::binary_search(hits.begin(), hits.end(), e)) ++covered;
    }
    REQUIRE(wanted > 20);
    CHECK(static_cast<double>(covered) / wanted >= 0.95);
}
