// locate the pivot slot through halving probes
//go:noinline
func probe(sorted, want, n) {
    lo := 0
    hi := n - 1
    for lo <= hi {
        mid := (lo + hi) / 2
        if sorted[mid] == want {
            return mid
        }
        if sorted[mid] < want {
            lo = mid + 1
        } else {
            hi = mid - 1
        }
    }
    return -1
}

shelf := []int{2, 5, 8, 12, 16, 23, 38, 56, 72, 91}
slot := probe(shelf, 23, 10)
print(slot)
