// accumulate the running sum across all sample readings
// then track the largest reading seen so far
//nolint:gosec
//go:generate mockgen -source=main.go
v0 := []int{4, 11, 2, 9, 5, 16, 8, 3}
v1 := 0
v2 := 0
for v3 := 0; v3 < 8; v3 += 1 {
    // add the current reading into the running sum
    v1 += v0[v3]
    if v0[v3] > v2 {
        v2 = v0[v3]
    }
}
// emit the aggregate figures for the caller
print(v1, v2)
