#pragma once

#include <cstdint>
#include <fstream>
#include <string>

#include "prcnn/error.hpp"
#include "prcnn/io.hpp"
#include "prcnn/model.hpp"

namespace prcnn {

// Checkpoint file: magic "PRCN", version u16 = 1, the nine architecture
// integers as u32 (t, b, u, d_out, n1, f1, n2, f2, k), u8 peepholes flag,
// u8 tdd_relu flag, f32 dropout rate, u32 parameter-tensor count, then each
// parameter as (u16 name length + name, u32 rank, u32 dims, little-endian
// f32 data). Round trips bit-exactly.
inline void save_checkpoint(const std::string& path, PixelRcnnModel<float>& model) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open for writing: " + path);
    io::store_bytes(os, "PRCN", 4);
    io::store_u16(os, 1);
    const ModelConfig& c = model.config;
    for (std::size_t dim : {c.t, c.b, c.u, c.d_out, c.n1, c.f1, c.n2, c.f2, c.k})
        io::store_u32(os, static_cast<std::uint32_t>(dim));
    unsigned char flags[2] = {static_cast<unsigned char>(c.peepholes ? 1 : 0),
                              static_cast<unsigned char>(c.tdd_relu ? 1 : 0)};
    io::store_bytes(os, flags, 2);
    io::store_f32(os, static_cast<float>(c.dropout_p));
    const auto params = model_params(model);
    io::store_u32(os, static_cast<std::uint32_t>(params.size()));
    for (const auto& p : params) {
        io::store_string(os, p.name);
        io::store_u32(os, static_cast<std::uint32_t>(p.tensor->rank()));
        for (std::size_t d : p.tensor->shape())
            io::store_u32(os, static_cast<std::uint32_t>(d));
        for (std::size_t i = 0; i < p.tensor->numel(); ++i)
            io::store_f32(os, (*p.tensor)[i]);
    }
    if (!os) throw data_error("write failed: " + path);
}

inline PixelRcnnModel<float> load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open: " + path);
    char magic[4];
    io::load_bytes(is, magic, 4, "magic");
    if (std::string(magic, 4) != "PRCN")
        throw format_error("checkpoint: bad magic");
    if (io::load_u16(is, "version") != 1)
        throw format_error("checkpoint: unsupported version");
    ModelConfig c;
    std::size_t* dims[] = {&c.t, &c.b, &c.u, &c.d_out, &c.n1,
                           &c.f1, &c.n2, &c.f2, &c.k};
    for (std::size_t* d : dims) *d = io::load_u32(is, "architecture");
    unsigned char flags[2];
    io::load_bytes(is, flags, 2, "flags");
    if (flags[0] > 1 || flags[1] > 1) throw format_error("checkpoint: bad flags");
    c.peepholes = flags[0] != 0;
    c.tdd_relu = flags[1] != 0;
    c.dropout_p = static_cast<double>(io::load_f32(is, "dropout rate"));

    PixelRcnnModel<float> model;
    try {
        model = make_model<float>(c);
    } catch (const error& e) {
        throw format_error(std::string("checkpoint: invalid architecture: ") +
                           e.what());
    }
    auto params = model_params(model);
    const std::uint32_t count = io::load_u32(is, "parameter count");
    if (count != params.size())
        throw format_error("checkpoint: parameter count mismatch");
    for (auto& p : params) {
        if (io::load_string(is, "parameter name") != p.name)
            throw format_error("checkpoint: parameter order mismatch");
        const std::uint32_t rank = io::load_u32(is, "parameter rank");
        if (rank != p.tensor->rank())
            throw format_error("checkpoint: parameter rank mismatch");
        for (std::size_t d = 0; d < rank; ++d)
            if (io::load_u32(is, "parameter dims") != p.tensor->dim(d))
                throw format_error("checkpoint: parameter shape mismatch");
        for (std::size_t i = 0; i < p.tensor->numel(); ++i)
            (*p.tensor)[i] = io::load_f32(is, "parameter data");
    }
    return model;
}

}  // namespace prcnn
