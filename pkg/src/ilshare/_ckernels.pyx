# cython: language_level=3, boundscheck=False, wraparound=False
"""GMP-backed convolution kernels.

Same contracts as ``ilshare._pykernels``; the inner products run on ``mpz_t``
arrays so the O(n^2) loops never touch Python objects.
"""
from libc.stdlib cimport calloc, free

cdef extern from "gmp.h":
    ctypedef struct __mpz_struct:
        pass
    ctypedef __mpz_struct* mpz_ptr
    void mpz_init(mpz_ptr)
    void mpz_clear(mpz_ptr)
    void mpz_set(mpz_ptr, mpz_ptr)
    void mpz_set_ui(mpz_ptr, unsigned long)
    void mpz_add(mpz_ptr, mpz_ptr, mpz_ptr)
    void mpz_addmul(mpz_ptr, mpz_ptr, mpz_ptr)
    void mpz_mul_si(mpz_ptr, mpz_ptr, long)
    void mpz_neg(mpz_ptr, mpz_ptr)
    int mpz_sgn(mpz_ptr)
    size_t mpz_sizeinbase(mpz_ptr, int)
    void mpz_import(mpz_ptr, size_t, int, size_t, int, size_t, const void*)
    void* mpz_export(void*, size_t*, int, size_t, int, size_t, mpz_ptr)


cdef class _MpzArray:
    cdef __mpz_struct* data
    cdef Py_ssize_t size

    def __cinit__(self, Py_ssize_t size):
        self.size = size
        self.data = <__mpz_struct*> calloc(size if size > 0 else 1, sizeof(__mpz_struct))
        if self.data == NULL:
            raise MemoryError()
        cdef Py_ssize_t i
        for i in range(size):
            mpz_init(&self.data[i])

    def __dealloc__(self):
        cdef Py_ssize_t i
        if self.data != NULL:
            for i in range(self.size):
                mpz_clear(&self.data[i])
            free(self.data)


cdef void _load(mpz_ptr dst, object value):
    cdef bytes raw
    cdef int negative = value < 0
    if negative:
        value = -value
    if value == 0:
        mpz_set_ui(dst, 0)
        return
    raw = value.to_bytes((value.bit_length() + 7) // 8, "little")
    mpz_import(dst, len(raw), -1, 1, 0, 0, <const char*> raw)
    if negative:
        mpz_neg(dst, dst)


cdef object _store(mpz_ptr src):
    cdef size_t nbytes, count = 0
    cdef int sign = mpz_sgn(src)
    if sign == 0:
        return 0
    nbytes = (mpz_sizeinbase(src, 2) + 7) // 8
    buf = bytearray(nbytes)
    cdef char* ptr = buf
    mpz_export(ptr, &count, -1, 1, 0, 0, src)
    value = int.from_bytes(bytes(buf[:count]), "little")
    return -value if sign < 0 else value


cdef _MpzArray _from_seq(seq, Py_ssize_t size):
    cdef _MpzArray arr = _MpzArray(size)
    cdef Py_ssize_t i
    for i in range(size):
        _load(&arr.data[i], seq[i])
    return arr


def convolve(u, v, Py_ssize_t horizon):
    """Shifted Cauchy product: ``c[0] = 0`` and ``c[n] = sum_{k<n} u[k] v[n-1-k]``."""
    u, v = list(u[:horizon]), list(v[:horizon])
    su = [k for k, x in enumerate(u) if x]
    sv = [k for k, x in enumerate(v) if x]
    if len(sv) < len(su):
        u, v, su = v, u, sv
    cdef _MpzArray a = _from_seq(u, horizon)
    cdef _MpzArray b = _from_seq(v, horizon)
    cdef _MpzArray acc = _MpzArray(1)
    cdef Py_ssize_t n, k, j, nnz = len(su)
    cdef Py_ssize_t* support = <Py_ssize_t*> calloc(nnz + 1, sizeof(Py_ssize_t))
    if support == NULL:
        raise MemoryError()
    for j in range(nnz):
        support[j] = su[j]
    out = [0]
    for n in range(1, horizon + 1):
        mpz_set_ui(&acc.data[0], 0)
        if nnz * 4 < horizon:
            for j in range(nnz):
                k = support[j]
                if k >= n:
                    break
                mpz_addmul(&acc.data[0], &a.data[k], &b.data[n - 1 - k])
        else:
            for k in range(n):
                mpz_addmul(&acc.data[0], &a.data[k], &b.data[n - 1 - k])
        out.append(_store(&acc.data[0]))
    free(support)
    return out


def self_recursive(u, v, long alpha, long beta, long gamma, Py_ssize_t horizon):
    """Solve ``w[n] = u[n] + alpha w[n-1] + sum_{k<n} (beta v[k] + gamma w[k]) w[n-1-k]``."""
    cdef Py_ssize_t size = horizon + 1
    cdef _MpzArray uu = _from_seq(u, size)
    cdef _MpzArray vv = _from_seq(v, size) if beta != 0 else _MpzArray(0)
    cdef _MpzArray w = _MpzArray(size)
    cdef _MpzArray coef = _MpzArray(size)
    cdef _MpzArray tmp = _MpzArray(1)
    cdef Py_ssize_t n, k

    mpz_set(&w.data[0], &uu.data[0])
    mpz_mul_si(&coef.data[0], &w.data[0], gamma)
    if beta != 0:
        mpz_mul_si(&tmp.data[0], &vv.data[0], beta)
        mpz_add(&coef.data[0], &coef.data[0], &tmp.data[0])
    for n in range(1, size):
        mpz_mul_si(&w.data[n], &w.data[n - 1], alpha)
        mpz_add(&w.data[n], &w.data[n], &uu.data[n])
        for k in range(n):
            mpz_addmul(&w.data[n], &coef.data[k], &w.data[n - 1 - k])
        mpz_mul_si(&coef.data[n], &w.data[n], gamma)
        if beta != 0:
            mpz_mul_si(&tmp.data[0], &vv.data[n], beta)
            mpz_add(&coef.data[n], &coef.data[n], &tmp.data[0])
    return [_store(&w.data[n]) for n in range(size)]
