#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "unrolldiff/datasets.hpp"

using namespace unrolldiff;

namespace {

struct TempFile {
  std::string path;
  TempFile(const std::string& name, const std::string& contents) : path(name) {
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("libsvm reader") {
  const TempFile f("test_read.libsvm",
                   "1 1:0.5 3:-2\n"
                   "-1 2:4\n"
                   "0.25 1:1 2:2 3:3\n");
  const DataSet data = read_libsvm(f.path);
  REQUIRE(data.features.rows() == 3);
  REQUIRE(data.features.cols() == 3);
  CHECK(data.labels[0] == 1.0);
  CHECK(data.labels[1] == -1.0);
  CHECK(data.labels[2] == 0.25);
  CHECK(data.features(0, 0) == 0.5);
  CHECK(data.features(0, 1) == 0.0);
  CHECK(data.features(0, 2) == -2.0);
  CHECK(data.features(1, 1) == 4.0);
  CHECK(data.features(2, 2) == 3.0);
}

TEST_CASE("libsvm reader error paths") {
  CHECK_THROWS_AS(read_libsvm("does_not_exist.libsvm"), std::runtime_error);
  const TempFile zero_idx("test_zeroidx.libsvm", "1 0:2\n");
  CHECK_THROWS_AS(read_libsvm(zero_idx.path), std::invalid_argument);
  const TempFile no_colon("test_nocolon.libsvm", "1 23\n");
  CHECK_THROWS_AS(read_libsvm(no_colon.path), std::invalid_argument);
  const TempFile bad_num("test_badnum.libsvm", "abc 1:2\n");
  CHECK_THROWS_AS(read_libsvm(bad_num.path), std::invalid_argument);
  const TempFile empty("test_empty.libsvm", "\n");
  CHECK_THROWS_AS(read_libsvm(empty.path), std::invalid_argument);
}

TEST_CASE("csv reader") {
  const TempFile f("test_read.csv",
                   "target,x1,x2\n"
                   "1.5,2,3\n"
                   "-0.5,4,5\n");
  const CsvTable table = read_csv(f.path);
  REQUIRE(table.header.size() == 3);
  CHECK(table.header[0] == "target");
  CHECK(table.values(1, 2) == 5.0);

  const DataSet data = dataset_from_csv(table, 0);
  CHECK(data.labels[0] == 1.5);
  CHECK(data.features(0, 0) == 2.0);
  CHECK(data.features(1, 1) == 5.0);
  CHECK_THROWS_AS(dataset_from_csv(table, 3), std::invalid_argument);
}

TEST_CASE("csv reader error paths") {
  const TempFile ragged("test_ragged.csv", "a,b\n1,2\n3\n");
  CHECK_THROWS_AS(read_csv(ragged.path), std::invalid_argument);
  const TempFile nonnum("test_nonnum.csv", "a,b\n1,x\n");
  CHECK_THROWS_AS(read_csv(nonnum.path), std::invalid_argument);
  const TempFile headless("test_headless.csv", "");
  CHECK_THROWS_AS(read_csv(headless.path), std::invalid_argument);
}

TEST_CASE("example files in the repository parse") {
  const DataSet svm = read_libsvm(std::string(UNROLLDIFF_DATA_DIR) + "/example.libsvm");
  CHECK(svm.features.rows() == 3);
  const CsvTable csv = read_csv(std::string(UNROLLDIFF_DATA_DIR) + "/example.csv");
  CHECK(csv.values.rows() == 3);
  const DataSet mini = read_libsvm(std::string(UNROLLDIFF_DATA_DIR) + "/mini_breast_cancer.libsvm");
  CHECK(mini.features.rows() == 20);
  CHECK(mini.features.cols() == 10);
}
