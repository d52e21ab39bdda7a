#include <hdf5.h>

#include "abcem/output.hpp"

namespace abcem {

namespace {

struct Handle {
    hid_t id = -1;
    herr_t (*closer)(hid_t) = nullptr;
    Handle(hid_t id_, herr_t (*closer_)(hid_t)) : id(id_), closer(closer_) {}
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() {
        if (id >= 0 && closer) closer(id);
    }
    operator hid_t() const { return id; }
    bool ok() const { return id >= 0; }
};

void silence_hdf5_once() {
    static const bool done = [] {
        H5Eset_auto2(H5E_DEFAULT, nullptr, nullptr);
        return true;
    }();
    (void)done;
}

void write_double_dataset(hid_t file, const std::string& path,
                          const std::vector<double>& values) {
    const hsize_t dims[1] = {values.size()};
    Handle space(H5Screate_simple(1, dims, nullptr), H5Sclose);
    Handle dataset(H5Dcreate2(file, path.c_str(), H5T_NATIVE_DOUBLE, space, H5P_DEFAULT,
                              H5P_DEFAULT, H5P_DEFAULT),
                   H5Dclose);
    if (!dataset.ok()) throw OutputError("cannot create dataset " + path);
    if (H5Dwrite(dataset, H5T_NATIVE_DOUBLE, H5S_ALL, H5S_ALL, H5P_DEFAULT, values.data()) < 0)
        throw OutputError("cannot write dataset " + path);
}

void write_text_dataset(hid_t file, const std::string& path, const std::string& text) {
    Handle type(H5Tcopy(H5T_C_S1), H5Tclose);
    H5Tset_size(type, text.empty() ? 1 : text.size());
    Handle space(H5Screate(H5S_SCALAR), H5Sclose);
    Handle dataset(H5Dcreate2(file, path.c_str(), type, space, H5P_DEFAULT, H5P_DEFAULT,
                              H5P_DEFAULT),
                   H5Dclose);
    if (!dataset.ok()) throw OutputError("cannot create dataset " + path);
    const std::string padded = text.empty() ? std::string(1, '\0') : text;
    if (H5Dwrite(dataset, type, H5S_ALL, H5S_ALL, H5P_DEFAULT, padded.data()) < 0)
        throw OutputError("cannot write dataset " + path);
}

template <typename T>
void write_scalar_dataset(hid_t file, const std::string& path, hid_t native_type, T value) {
    Handle space(H5Screate(H5S_SCALAR), H5Sclose);
    Handle dataset(H5Dcreate2(file, path.c_str(), native_type, space, H5P_DEFAULT, H5P_DEFAULT,
                              H5P_DEFAULT),
                   H5Dclose);
    if (!dataset.ok()) throw OutputError("cannot create dataset " + path);
    if (H5Dwrite(dataset, native_type, H5S_ALL, H5S_ALL, H5P_DEFAULT, &value) < 0)
        throw OutputError("cannot write dataset " + path);
}

}  // namespace

void write_container_run(const RunOutput& output, const std::filesystem::path& file) {
    silence_hdf5_once();
    Handle handle(H5Fcreate(file.string().c_str(), H5F_ACC_TRUNC, H5P_DEFAULT, H5P_DEFAULT),
                  H5Fclose);
    if (!handle.ok()) throw OutputError("cannot create container file " + file.string());

    Handle series(H5Gcreate2(handle, "/series", H5P_DEFAULT, H5P_DEFAULT, H5P_DEFAULT),
                  H5Gclose);
    Handle snapshots(H5Gcreate2(handle, "/snapshots", H5P_DEFAULT, H5P_DEFAULT, H5P_DEFAULT),
                     H5Gclose);
    Handle meta(H5Gcreate2(handle, "/meta", H5P_DEFAULT, H5P_DEFAULT, H5P_DEFAULT), H5Gclose);
    if (!series.ok() || !snapshots.ok() || !meta.ok())
        throw OutputError("cannot lay out container groups");

    write_double_dataset(handle, "/series/price", output.price_series);
    write_double_dataset(handle, "/series/excess_demand", output.ed_series);
    for (const auto& [name, values] : output.observables)
        write_double_dataset(handle, "/series/" + name, values);
    for (const auto& [name, values] : output.snapshots)
        write_double_dataset(handle, "/snapshots/" + name, values);

    write_text_dataset(handle, "/meta/config", output.embedded_config);
    {
        const hsize_t dims[1] = {2};
        const std::uint64_t seeds[2] = {output.master_seed, output.run_seed};
        Handle space(H5Screate_simple(1, dims, nullptr), H5Sclose);
        Handle dataset(H5Dcreate2(handle, "/meta/seed", H5T_NATIVE_UINT64, space, H5P_DEFAULT,
                                  H5P_DEFAULT, H5P_DEFAULT),
                       H5Dclose);
        if (!dataset.ok()) throw OutputError("cannot create dataset /meta/seed");
        if (H5Dwrite(dataset, H5T_NATIVE_UINT64, H5S_ALL, H5S_ALL, H5P_DEFAULT, seeds) < 0)
            throw OutputError("cannot write dataset /meta/seed");
    }
    write_scalar_dataset<std::int64_t>(handle, "/meta/run_index", H5T_NATIVE_INT64,
                                       output.run_index);
    write_scalar_dataset<double>(handle, "/meta/wall_time", H5T_NATIVE_DOUBLE,
                                 output.wall_time_seconds);
}

std::vector<double> read_container_series(const std::filesystem::path& file,
                                          const std::string& dataset_path) {
    silence_hdf5_once();
    Handle handle(H5Fopen(file.string().c_str(), H5F_ACC_RDONLY, H5P_DEFAULT), H5Fclose);
    if (!handle.ok()) throw OutputError("cannot open container file " + file.string());
    Handle dataset(H5Dopen2(handle, dataset_path.c_str(), H5P_DEFAULT), H5Dclose);
    if (!dataset.ok()) throw OutputError("missing dataset " + dataset_path);
    Handle space(H5Dget_space(dataset), H5Sclose);
    hsize_t dims[1] = {0};
    if (H5Sget_simple_extent_ndims(space) != 1 ||
        H5Sget_simple_extent_dims(space, dims, nullptr) < 0)
        throw OutputError(dataset_path + " is not a one-dimensional dataset");
    std::vector<double> values(dims[0]);
    if (H5Dread(dataset, H5T_NATIVE_DOUBLE, H5S_ALL, H5S_ALL, H5P_DEFAULT, values.data()) < 0)
        throw OutputError("cannot read dataset " + dataset_path);
    return values;
}

std::string read_container_text(const std::filesystem::path& file,
                                const std::string& dataset_path) {
    silence_hdf5_once();
    Handle handle(H5Fopen(file.string().c_str(), H5F_ACC_RDONLY, H5P_DEFAULT), H5Fclose);
    if (!handle.ok()) throw OutputError("cannot open container file " + file.string());
    Handle dataset(H5Dopen2(handle, dataset_path.c_str(), H5P_DEFAULT), H5Dclose);
    if (!dataset.ok()) throw OutputError("missing dataset " + dataset_path);
    Handle type(H5Dget_type(dataset), H5Tclose);
    const std::size_t size = H5Tget_size(type);
    std::string text(size, '\0');
    if (H5Dread(dataset, type, H5S_ALL, H5S_ALL, H5P_DEFAULT, text.data()) < 0)
        throw OutputError("cannot read dataset " + dataset_path);
    while (!text.empty() && text.back() == '\0') text.pop_back();
    return text;
}

}  // namespace abcem
