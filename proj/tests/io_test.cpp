#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "ehd/artifact.hpp"
#include "ehd/csv.hpp"
#include "ehd/units.hpp"
#include "test_support.hpp"

using namespace ehd;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "ehd_io_test";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

TEST(Units, QuantityParsing) {
    using units::Dimension;
    using units::parse_quantity;
    EXPECT_DOUBLE_EQ(parse_quantity("5.2kV", Dimension::voltage), 5.2 * 1e3);
    EXPECT_DOUBLE_EQ(parse_quantity("4600", Dimension::voltage), 4600.0);
    EXPECT_DOUBLE_EQ(parse_quantity("9.48uA", Dimension::current), 9.48 * 1e-6);
    EXPECT_DOUBLE_EQ(parse_quantity("260uN", Dimension::force), 260.0 * 1e-6);
    EXPECT_DOUBLE_EQ(parse_quantity("0.3mN", Dimension::force), 0.3 * 1e-3);
    EXPECT_DOUBLE_EQ(parse_quantity("37mg", Dimension::mass), 37.0 * 1e-6);
    EXPECT_DOUBLE_EQ(parse_quantity("3.5mm", Dimension::length), 3.5 * 1e-3);
    EXPECT_DOUBLE_EQ(parse_quantity("2e-4", Dimension::length), 2e-4);
}

TEST(Units, BadQuantities) {
    using units::Dimension;
    try {
        units::parse_quantity("5.2MV", Dimension::voltage);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::unit_error);
    }
    try {
        units::parse_quantity("kV", Dimension::voltage);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::parse_error);
    }
    EXPECT_THROW(units::parse_quantity("1.2.3", Dimension::voltage), Error);
}

TEST(Units, FormatRoundTripsExactly) {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
    std::uniform_int_distribution<int> exponent(-12, 6);
    for (int trial = 0; trial < 500; ++trial) {
        const double value = mantissa(rng) * std::pow(10.0, exponent(rng));
        EXPECT_EQ(units::parse_number(units::format_double(value)), value);
    }
}

TEST(ParseMeasurements, HeaderUnitsConvert) {
    const auto data = csv::parse_measurements(
        std::string("thruster,voltage_kV,current_uA\n1,4.6,9.48\n"));
    ASSERT_EQ(data.vi.size(), 1u);
    EXPECT_EQ(data.vi[0].thruster_id, 1);
    EXPECT_DOUBLE_EQ(data.vi[0].voltage, 4.6 * 1e3);
    EXPECT_DOUBLE_EQ(data.vi[0].current, 9.48 * 1e-6);
    EXPECT_TRUE(data.vf.empty());
}

TEST(ParseMeasurements, ThrusterIdHeaderVariant) {
    const auto data = csv::parse_measurements(
        std::string("thruster_id,voltage_V,current_A\n3,4600,9e-6\n"));
    ASSERT_EQ(data.vi.size(), 1u);
    EXPECT_EQ(data.vi[0].thruster_id, 3);
}

TEST(ParseMeasurements, BothMeasurementColumns) {
    const auto data = csv::parse_measurements(std::string(
        "thruster,voltage_V,current_A,thrust_uN\n"
        "1,4600,9.48e-6,144.3\n"
        "2,4600,9.5e-6,\n"));
    ASSERT_EQ(data.vi.size(), 2u);
    ASSERT_EQ(data.vf.size(), 1u);
    EXPECT_DOUBLE_EQ(data.vf[0].thrust, 144.3 * 1e-6);
    EXPECT_EQ(data.vf[0].thruster_id, 1);
}

TEST(ParseMeasurements, CommentsBlankLinesAndCrlf) {
    const auto data = csv::parse_measurements(std::string(
        "# apparatus notes\r\n\r\nthruster,voltage_V,current_A\r\n# mid comment\r\n1,4600,9e-6\r\n"));
    ASSERT_EQ(data.vi.size(), 1u);
    EXPECT_EQ(data.vi[0].voltage, 4600.0);
}

TEST(ParseMeasurements, EmptyFile) {
    try {
        csv::parse_measurements(std::string(""));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::empty_file);
    }
    try {
        csv::parse_measurements(std::string("# only a comment\n"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::empty_file);
    }
}

TEST(ParseMeasurements, NegativeVoltageNamesLineAndConstraint) {
    try {
        csv::parse_measurements(
            std::string("thruster,voltage_V,current_A\n1,4600,9e-6\n1,-5,1e-6\n"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::parse_error);
        const std::string what = e.what();
        EXPECT_NE(what.find("line 3"), std::string::npos);
        EXPECT_NE(what.find("voltage"), std::string::npos);
        EXPECT_NE(what.find("> 0"), std::string::npos);
    }
}

TEST(ParseMeasurements, UnknownColumnRejected) {
    try {
        csv::parse_measurements(std::string("thruster,voltage_V,humidity\n1,4600,0.4\n"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::parse_error);
        EXPECT_NE(std::string(e.what()).find("humidity"), std::string::npos);
    }
}

TEST(ParseMeasurements, UnknownUnitSuffix) {
    try {
        csv::parse_measurements(std::string("thruster,voltage_MV,current_A\n1,0.0046,9e-6\n"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::unit_error);
    }
}

TEST(ParseMeasurements, RowWithoutAnyMeasurement) {
    try {
        csv::parse_measurements(
            std::string("thruster,voltage_V,current_A,thrust_N\n1,4600,,\n"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::parse_error);
    }
}

TEST(ParseMeasurements, FieldCountMismatch) {
    try {
        csv::parse_measurements(std::string("thruster,voltage_V,current_A\n1,4600\n"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::parse_error);
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(CsvClosure, EmitParseEmitIsByteStable) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> dv(3000.0, 5200.0);
    std::uniform_real_distribution<double> di(0.0, 2e-5);
    std::uniform_int_distribution<int> id(1, 4);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<calib::VISample> samples;
        for (int i = 0; i < 30; ++i) samples.push_back({dv(rng), di(rng), id(rng)});

        std::ostringstream first;
        csv::emit_vi_csv(first, samples);
        const auto parsed = csv::parse_measurements(first.str());
        ASSERT_EQ(parsed.vi.size(), samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            EXPECT_EQ(parsed.vi[i].voltage, samples[i].voltage);
            EXPECT_EQ(parsed.vi[i].current, samples[i].current);
            EXPECT_EQ(parsed.vi[i].thruster_id, samples[i].thruster_id);
        }
        std::ostringstream second;
        csv::emit_vi_csv(second, parsed.vi);
        EXPECT_EQ(first.str(), second.str());
    }
}

io::ModelArtifact sample_artifact() {
    io::ModelArtifact a;
    a.model = {2.06e-12, 3600.0};
    a.per_thruster = {{1, {2.1e-12, 3500.0}, 1e-8},
                      {2, {2.0e-12, 3600.0}, 2e-8},
                      {3, {2.02e-12, 3600.0}, 3e-8},
                      {4, {1.99e-12, 3700.0}, 4e-8}};
    a.loss = {0.87};
    a.geometry = {3.5e-3, 21.6e-6, 0.3275, 3.5e-3, 8};
    a.gas = {2e-4};
    a.rms_residual = 2.5e-8;
    a.v_crit_mean = 3600.0;
    a.v_crit_std = 81.65;
    return a;
}

TEST(Artifact, SaveLoadPreservesEveryField) {
    const fs::path path = temp_dir() / "model.json";
    const io::ModelArtifact original = sample_artifact();
    io::save_model(original, path);
    const io::ModelArtifact loaded = io::load_model(path);

    EXPECT_EQ(loaded.model.c_geom, original.model.c_geom);
    EXPECT_EQ(loaded.model.v_crit, original.model.v_crit);
    ASSERT_EQ(loaded.per_thruster.size(), original.per_thruster.size());
    for (std::size_t i = 0; i < original.per_thruster.size(); ++i) {
        EXPECT_EQ(loaded.per_thruster[i].thruster_id, original.per_thruster[i].thruster_id);
        EXPECT_EQ(loaded.per_thruster[i].model.c_geom, original.per_thruster[i].model.c_geom);
        EXPECT_EQ(loaded.per_thruster[i].model.v_crit, original.per_thruster[i].model.v_crit);
        EXPECT_EQ(loaded.per_thruster[i].rms_residual, original.per_thruster[i].rms_residual);
    }
    EXPECT_EQ(loaded.loss.eta, original.loss.eta);
    EXPECT_EQ(loaded.geometry.gap_d, original.geometry.gap_d);
    EXPECT_EQ(loaded.geometry.flow_area, original.geometry.flow_area);
    EXPECT_EQ(loaded.geometry.blockage, original.geometry.blockage);
    EXPECT_EQ(loaded.geometry.lever_arm_l, original.geometry.lever_arm_l);
    EXPECT_EQ(loaded.geometry.emitter_tip_count, original.geometry.emitter_tip_count);
    EXPECT_EQ(loaded.gas.ion_mobility, original.gas.ion_mobility);
    EXPECT_EQ(loaded.rms_residual, original.rms_residual);
    EXPECT_EQ(loaded.v_crit_mean, original.v_crit_mean);
    EXPECT_EQ(loaded.v_crit_std, original.v_crit_std);
    EXPECT_EQ(loaded.vehicle.mass, original.vehicle.mass);
    EXPECT_EQ(loaded.vehicle.v_spark, original.vehicle.v_spark);
}

TEST(Artifact, SaveLoadSaveIsByteIdentical) {
    const fs::path a = temp_dir() / "a.json";
    const fs::path b = temp_dir() / "b.json";
    io::save_model(sample_artifact(), a);
    io::save_model(io::load_model(a), b);
    EXPECT_EQ(slurp(a), slurp(b));
}

TEST(Artifact, MissingVersionTag) {
    try {
        io::deserialize_model(R"({"townsend": {"c_geom_A_per_V2": 2e-12, "v_crit_V": 3600}})");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::version_mismatch);
    }
}

TEST(Artifact, WrongVersionValue) {
    std::string text = io::serialize_model(sample_artifact());
    const auto pos = text.find("\"format_version\": 1");
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, 19, "\"format_version\": 2");
    try {
        io::deserialize_model(text);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::version_mismatch);
    }
}

TEST(Artifact, InvariantEnforcedAtBoundary) {
    std::string text = io::serialize_model(sample_artifact());
    const auto pos = text.find("2.06e-12");
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, 8, "-1.0e-12");
    try {
        io::deserialize_model(text);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::schema_error);
    }
}

TEST(Artifact, MissingFieldIsSchemaError) {
    try {
        io::deserialize_model(R"({"format_version": 1, "townsend": {"v_crit_V": 3600}})");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::schema_error);
    }
}

TEST(Artifact, MalformedJson) {
    try {
        io::deserialize_model("{not json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::parse_error);
    }
}

TEST(Artifact, UnreadablePath) {
    try {
        io::load_model(temp_dir() / "does_not_exist.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::io_error);
    }
}

TEST(Artifact, ShippedDefaultsFileLoads) {
    const io::ModelArtifact a = io::load_model(fs::path(EHD_DATA_DIR) / "default_model.json");
    EXPECT_EQ(a.model.c_geom, 2.06e-12);
    EXPECT_EQ(a.model.v_crit, 3600.0);
    EXPECT_EQ(a.loss.eta, 0.87);
    EXPECT_EQ(a.geometry.gap_d, 3.5e-3);
    EXPECT_EQ(a.geometry.flow_area, 21.6e-6);
    EXPECT_EQ(a.gas.ion_mobility, 2e-4);
    EXPECT_EQ(a.vehicle.mass, 37e-6);
    EXPECT_EQ(a.vehicle.v_spark, 5200.0);
    EXPECT_NEAR(a.vehicle.mass * a.vehicle.gravity, 362.6e-6, 1e-12);
}

TEST(Artifact, ShippedSampleMeasurementsParse) {
    std::ifstream in(fs::path(EHD_DATA_DIR) / "sample_measurements.csv");
    ASSERT_TRUE(in.good());
    const auto data = csv::parse_measurements(in);
    EXPECT_EQ(data.vi.size(), 20u);
    EXPECT_EQ(data.vf.size(), 20u);
}

} // namespace
