#include <pybind11/pybind11.h>
PYBIND11_MODULE(_edgematch, m) { m.doc() = "edge-matching puzzle solvers"; }
