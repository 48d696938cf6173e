#include <pybind11/pybind11.h>

PYBIND11_MODULE(_entroscope, m) {
  m.doc() = "entroscope core bindings";
}
