#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>

namespace csmv {

// One video's precomputed frame-level features: v_l x d_raw, finite entries.
struct VideoFeatures {
    std::string video_id;
    Eigen::MatrixXd frames;

    Eigen::Index v_l() const { return frames.rows(); }
    Eigen::Index d_raw() const { return frames.cols(); }
};

// Binary layout: "CSMV" | version u32 LE = 1 | v_l u32 LE | d_raw u32 LE |
// v_l * d_raw float32 LE, row-major. Values are held as doubles in memory;
// the float32 payload survives a read/write round trip bit for bit.
inline constexpr char kFeatureMagic[4] = {'C', 'S', 'M', 'V'};
inline constexpr std::uint32_t kFeatureVersion = 1;

Eigen::MatrixXd read_feature_matrix(const std::filesystem::path& path);
void write_feature_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);

inline VideoFeatures read_video_features(const std::filesystem::path& path, std::string video_id = {}) {
    return VideoFeatures{std::move(video_id), read_feature_matrix(path)};
}

inline void write_video_features(const std::filesystem::path& path, const VideoFeatures& f) {
    write_feature_matrix(path, f.frames);
}

}  // namespace csmv
