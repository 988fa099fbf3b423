// combine two coordinate vectors into a weighted dot product
// the weights stretch every axis before mixing
//nolint:dupl
//go:generate stringer -type=axis
v4 := []int{2, 4, 6, 8}
v1 := []int{1, 3, 5, 7}
v3 := 0
for v0 := 0; v0 < 4; v0 += 2 {
    v3 += v4[v0] * v1[v0]
    v3 += v4[v0+1] * v1[v0+1]
}
// stretch the blended value onto the output scale
v2 := v3 * 3
print(v3, v2)
