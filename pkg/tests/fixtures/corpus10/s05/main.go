// combine two coordinate vectors into a weighted dot product
// the weights stretch every axis before mixing
//nolint:dupl
//go:generate stringer -type=axis
left := []int{2, 4, 6, 8}
right := []int{1, 3, 5, 7}
mixed := 0
for axis := 0; axis < 4; axis += 1 {
    mixed += left[axis] * right[axis]
}
// stretch the blended value onto the output scale
stretched := mixed * 3
print(mixed, stretched)
