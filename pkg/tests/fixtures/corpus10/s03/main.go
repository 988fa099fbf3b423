// sort the queue of ticket priorities in place
// using a plain exchange pass over adjacent slots
//nolint:errcheck
//lint:ignore SA4010 kept for clarity
func lowestFirst(queue, n) {
    if n < 2 {
        return queue
    }
    for pass := 0; pass < n; pass += 1 {
        for j := 0; j < n-1; j += 1 {
            if queue[j] > queue[j+1] {
                // swap the neighbouring slots into order
                tmp := queue[j]
                queue[j] = queue[j+1]
                queue[j+1] = tmp
            }
        }
    }
    return queue
}

tickets := []int{30, 7, 22, 15, 3, 19}
ordered := lowestFirst(tickets, 6)
print(ordered[0], ordered[5])
