#include "antnav/render.hpp"

#include "antnav/rng.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace antnav {

RayHit cast_ray(const Scene &scene, Vec2 origin, double angle, double max_range)
{
    const double s = scene.cell_size();
    const Vec2 dir = unit(angle);
    int cx = scene.cell_x(origin.x);
    int cy = scene.cell_y(origin.y);
    const int step_x = dir.x > 0 ? 1 : -1;
    const int step_y = dir.y > 0 ? 1 : -1;
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double delta_x = dir.x != 0.0 ? s / std::abs(dir.x) : inf;
    const double delta_y = dir.y != 0.0 ? s / std::abs(dir.y) : inf;
    double t_x = dir.x > 0 ? ((cx + 1) * s - origin.x) / dir.x : (dir.x < 0 ? (cx * s - origin.x) / dir.x : inf);
    double t_y = dir.y > 0 ? ((cy + 1) * s - origin.y) / dir.y : (dir.y < 0 ? (cy * s - origin.y) / dir.y : inf);

    RayHit hit;
    if (scene.is_wall(cx, cy)) {
        hit.hit = true;
        hit.cell_x = cx;
        hit.cell_y = cy;
        return hit;
    }
    while (true) {
        double t = 0.0;
        if (t_x < t_y) {
            t = t_x;
            cx += step_x;
            t_x += delta_x;
            hit.vertical_face = true;
        } else {
            t = t_y;
            cy += step_y;
            t_y += delta_y;
            hit.vertical_face = false;
        }
        if (t > max_range)
            return RayHit{};
        if (scene.is_wall(cx, cy)) {
            const Vec2 p = origin + dir * t;
            hit.hit = true;
            hit.distance = t;
            hit.cell_x = cx;
            hit.cell_y = cy;
            const double along = hit.vertical_face ? p.y : p.x;
            hit.face_u = std::clamp(along / s - std::floor(along / s), 0.0, std::nextafter(1.0, 0.0));
            return hit;
        }
    }
}

std::vector<RayHit> cast_rays(const Scene &scene, const Pose &pose, const CameraConfig &camera)
{
    std::vector<RayHit> hits;
    hits.reserve(static_cast<std::size_t>(camera.columns));
    for (int c = 0; c < camera.columns; ++c)
        hits.push_back(cast_ray(scene, pose.position(), pose.heading + camera.column_offset(c), camera.max_range));
    return hits;
}

double wall_texture(const Scene &scene, const RayHit &hit, bool textures)
{
    if (!textures)
        return 0.6;
    // Per-face hash: base shade plus 1-3 stripes along the face.
    const std::uint64_t key = splitmix64(scene.texture_seed() ^ splitmix64(static_cast<std::uint64_t>(hit.cell_x) << 32 |
                                                                           static_cast<std::uint32_t>(hit.cell_y)) ^
                                         (hit.vertical_face ? 0x5bd1e995ULL : 0ULL));
    const double base = 0.25 + 0.5 * static_cast<double>(key & 0xffff) / 65535.0;
    const int stripes = 1 + static_cast<int>((key >> 16) % 3);
    const double phase = static_cast<double>((key >> 24) & 0xff) / 256.0;
    const double u = hit.face_u * stripes + phase;
    const bool dark = (u - std::floor(u)) < 0.5;
    return std::clamp(base + (dark ? -0.1 : 0.1), 0.15, 0.85);
}

namespace {

double overlap(double lo, double hi, double a, double b)
{
    return std::max(0.0, std::min(hi, b) - std::max(lo, a));
}

}  // namespace

Image render_view(const Scene &scene, const Pose &pose, const CameraConfig &camera)
{
    Image image(camera.rows, camera.columns);
    const int sub = std::max(1, camera.supersample);
    const double row_h = camera.row_height();
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (int c = 0; c < camera.columns; ++c) {
        for (int k = 0; k < sub; ++k) {
            const double offset = camera.column_offset(c) + camera.column_width() * (0.5 - (k + 0.5) / sub);
            const RayHit hit = cast_ray(scene, pose.position(), pose.heading + offset, camera.max_range);
            double top = 0.0;
            double bottom = 0.0;
            double shade = 0.0;
            if (hit.hit) {
                const double d = std::max(hit.distance, 1e-6);
                top = std::atan2(camera.wall_height - camera.eye_height, d);
                bottom = -std::atan2(camera.eye_height, d);
                shade = wall_texture(scene, hit, camera.textures) / (1.0 + 0.15 * d);
            }
            // Area-weighted mix of sky, wall band and floor over the pixel.
            for (int r = 0; r < camera.rows; ++r) {
                const double mid = camera.row_elevation(r);
                const double lo = mid - row_h / 2.0;
                const double hi = mid + row_h / 2.0;
                const double sky = overlap(lo, hi, top, inf);
                const double floor = overlap(lo, hi, -inf, bottom);
                const double band = overlap(lo, hi, bottom, top);
                image.at(r, c) += (sky * kSkyShade + floor * kFloorShade + band * shade) / (row_h * sub);
            }
        }
    }
    return image;
}

namespace {

std::vector<double> gaussian_kernel(double sigma)
{
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        kernel[static_cast<std::size_t>(i + radius)] = v;
        sum += v;
    }
    for (double &v : kernel)
        v /= sum;
    return kernel;
}

int reflect(int i, int n)
{
    // Symmetric padding: ... 2 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
    while (i < 0 || i >= n) {
        if (i < 0)
            i = -i - 1;
        if (i >= n)
            i = 2 * n - i - 1;
    }
    return i;
}

Image gaussian_blur(const Image &image, double sigma)
{
    const auto kernel = gaussian_kernel(sigma);
    const int radius = static_cast<int>(kernel.size() / 2);
    const int rows = image.rows();
    const int cols = image.columns();
    Image horizontal(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k)
                acc += kernel[static_cast<std::size_t>(k + radius)] * image.at(r, reflect(c + k, cols));
            horizontal.at(r, c) = acc;
        }
    Image out(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k)
                acc += kernel[static_cast<std::size_t>(k + radius)] * horizontal.at(reflect(r + k, rows), c);
            out.at(r, c) = acc;
        }
    return out;
}

}  // namespace

Image dog_filter(const Image &image, double sigma_center, double sigma_surround)
{
    const Image center = gaussian_blur(image, sigma_center);
    const Image surround = gaussian_blur(image, sigma_surround);
    Image out(image.rows(), image.columns());
    for (std::size_t i = 0; i < out.pixels().size(); ++i)
        out.pixels()[i] = center.pixels()[i] - surround.pixels()[i];
    return out;
}

PnVector preprocess(const Image &raw)
{
    for (double v : raw.pixels())
        if (!std::isfinite(v))
            throw std::invalid_argument("non-finite pixel in raw view");

    const Image response = dog_filter(raw);
    const auto [lo_it, hi_it] = std::minmax_element(response.pixels().begin(), response.pixels().end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    PnVector pn;
    pn.values.resize(response.pixels().size());
    // Flat frames differ from zero only by rounding in the blur.
    if (hi - lo <= 1e-12) {
        std::fill(pn.values.begin(), pn.values.end(), 0.5f);
        return pn;
    }
    const double scale = 1.0 / (hi - lo);
    for (std::size_t i = 0; i < pn.values.size(); ++i)
        pn.values[i] = static_cast<float>(std::clamp((response.pixels()[i] - lo) * scale, 0.0, 1.0));
    return pn;
}

void write_pgm(const Image &image, const std::filesystem::path &path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << "P2\n" << image.columns() << ' ' << image.rows() << "\n255\n";
    for (int r = 0; r < image.rows(); ++r) {
        for (int c = 0; c < image.columns(); ++c) {
            const long level = std::lround(std::clamp(image.at(r, c), 0.0, 1.0) * 255.0);
            out << level << (c + 1 < image.columns() ? ' ' : '\n');
        }
    }
}

}  // namespace antnav
