// Umbrella header.

#pragma once

#include <diffham/catalog.hpp>
#include <diffham/cyclotomic.hpp>
#include <diffham/dsl.hpp>
#include <diffham/expr.hpp>
#include <diffham/linalg.hpp>
#include <diffham/oper.hpp>
#include <diffham/pva.hpp>
#include <diffham/schouten.hpp>
