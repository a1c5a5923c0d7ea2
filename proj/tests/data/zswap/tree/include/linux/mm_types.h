#ifndef _LINUX_MM_TYPES_H
#define _LINUX_MM_TYPES_H

#include <linux/types.h>

/*
 * Each physical page in the system has a struct page associated with
 * it to keep track of whatever it is we are using the page for at the
 * moment.
 */
struct page {
	/*
	 * Atomic flags, some possibly updated asynchronously. Writers that
	 * do not hold the page lock must use the atomic bitops; a plain
	 * read-modify-write of this word races with concurrent updates.
	 */
	unsigned long flags;
	/* Usage count. Do not use directly; see page_ref.h. */
	atomic_t _refcount;
	struct address_space *mapping;
	pgoff_t index;
};

#endif /* _LINUX_MM_TYPES_H */
